#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "motormap/dataset.hpp"

namespace motormap {

/// Everything a subcommand needs, filled from flags (flag > config file >
/// built-in default).
struct RunConfig {
    std::string input;
    std::string output;
    std::uint64_t seed = 42;
    ScaleMode scale = ScaleMode::zscore;

    // generate
    std::size_t pop_size = 20;
    std::size_t generations = 50;
    std::string single_op; // empty = all three operating points
    bool keep_infeasible = false;
    double min_efficiency = 0.82;
    double max_ripple = 0.4;

    // embed
    std::string method = "tsne";
    std::size_t out_dim = 2;
    double perplexity = 0.0; // 0 = min(30, (N-1)/3)
    int iterations = 1000;
    double learning_rate = 100.0;
    bool shared_sigma = false;
    bool exaggerate = false;
    std::string connect = "largest";
    std::string dump_betas; // optional: write per-point precisions (t-SNE)

    // metrics / pick
    std::string embedding;
    std::vector<std::string> compare;
    std::size_t k = 10; // neighborhood size (isomap + quality metrics)
    std::size_t clusters = 0;
    std::size_t restarts = 4;

    // plot
    std::string data_csv;
    std::string labels_csv;
    std::string color_by;
    int width = 800;
    int height = 600;
    double point_radius = 3.0;
};

void cmd_generate(const RunConfig& cfg);
void cmd_embed(const RunConfig& cfg);
void cmd_metrics(const RunConfig& cfg);
void cmd_plot(const RunConfig& cfg);
void cmd_pick(const RunConfig& cfg);

/// 1 = input error, 2 = numeric error, 3 = I/O error.
int exit_code_for(errc code);

/// Parses argv (CLI11) and dispatches; returns the process exit code.
int run_cli(int argc, char** argv);

} // namespace motormap

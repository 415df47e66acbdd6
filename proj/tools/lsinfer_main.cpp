// lsinfer: infer D0L-systems from developmental sequences, derive sequences,
// generate random systems, and benchmark the inference pipeline.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lsinfer/genbench.hpp"

namespace {

using namespace lsinfer;

constexpr std::string_view kVersion = "lsinfer 0.1.0";

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("LSINFER_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
            throw InputError("LSINFER_SEED is not a number");
        }
    }
    return 1;
}

Scheme parse_scheme(const std::string& name) {
    auto scheme = scheme_from_name(name);
    if (!scheme)
        throw InputError("unknown encoding '" + name +
                         "' (expected one of: osos1, osos2, g, l, mg, ml)");
    return *scheme;
}

struct GAFlags {
    int pop = -1;
    double cx = -1, mut = -1;
    int min_gens = -1;
    double time_limit_s = -1;
    std::uint64_t seed = 0;
    bool seed_set = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--pop", pop, "population size");
        cmd->add_option("--cx", cx, "crossover weight");
        cmd->add_option("--mut", mut, "mutation weight");
        cmd->add_option("--min-gens", min_gens, "minimum generations before convergence");
        cmd->add_option("--time-limit", time_limit_s, "per-GA-run time limit in seconds");
        cmd->add_option("--seed", seed, "random seed (default: LSINFER_SEED or 1)")
            ->each([this](const std::string&) { seed_set = true; });
    }

    GAConfig resolve(Scheme scheme) const {
        GAConfig cfg = default_ga_config(scheme);
        if (pop > 0) cfg.population = pop;
        if (cx >= 0) cfg.crossover = cx;
        if (mut >= 0) cfg.mutation = mut;
        if (min_gens >= 0) cfg.min_generations = min_gens;
        if (time_limit_s >= 0) cfg.time_limit_ms = static_cast<std::int64_t>(time_limit_s * 1000);
        cfg.seed = seed_set ? seed : default_seed();
        return cfg;
    }
};

int cmd_infer(const std::string& file, const std::string& encoding,
              const std::optional<std::string>& constants, const GAFlags& ga_flags,
              double total_time_s, bool lifo, bool dump_bounds) {
    Scheme scheme = parse_scheme(encoding);
    DevSequence rho = parse_sequence(read_file(file), constants);

    InferOptions opts;
    opts.scheme = scheme;
    opts.ga = ga_flags.resolve(scheme);
    opts.lifo = lifo;
    opts.dump_bounds = dump_bounds;
    opts.diagnostics = &std::cerr;
    if (total_time_s > 0) opts.total_time_ms = static_cast<std::int64_t>(total_time_s * 1000);

    InferResult result = infer(rho, opts);
    std::cerr << "status: " << infer_status_name(result.status) << "\n"
              << "encoding: " << scheme_name(scheme) << "\n"
              << "generations: " << result.generations << "\n"
              << "ga-runs: " << result.ga_runs << "\n"
              << "lifts: " << result.lifts << "\n"
              << "time-ms: " << result.wall_ms << "\n";
    if (result.status == InferStatus::Found) {
        std::cout << format_lsystem(*result.system);
        return 0;
    }
    std::cerr << "no compatible D0L-system found\n";
    return 1;
}

int cmd_derive(const std::string& file, std::size_t steps) {
    LSystem sys = parse_lsystem(read_file(file));
    if (steps == 0) {
        std::cout << sys.alphabet->render(sys.axiom) << "\n";
        return 0;
    }
    DevSequence rho = derive_sequence(sys, steps);
    std::cout << format_sequence(rho);
    return 0;
}

int cmd_generate(int size, int count, std::uint64_t seed, const std::string& out_dir,
                 int max_len, const std::string& constants) {
    GeneratorConfig cfg;
    cfg.nonconstants = size;
    cfg.constant_glyphs = constants;
    if (max_len > 0) cfg.max_successor_len = max_len;
    std::filesystem::create_directories(out_dir);
    for (int i = 0; i < count; ++i) {
        cfg.seed = seed + static_cast<std::uint64_t>(i);
        LSystem sys = generate_lsystem(cfg);
        std::filesystem::path path = std::filesystem::path(out_dir) /
                                     ("gen" + std::to_string(size) + "_" + std::to_string(i) +
                                      ".lsys");
        std::ofstream out(path, std::ios::binary);
        out << format_lsystem(sys);
        std::cout << path.string() << "\n";
    }
    return 0;
}

int cmd_benchmark(const std::vector<int>& sizes, int count, const std::string& encoding,
                  std::uint64_t seed, int jobs, double time_limit_s,
                  std::int64_t sequence_budget, int max_len, const std::string& format) {
    BenchmarkOptions opts;
    opts.scheme = parse_scheme(encoding);
    opts.generator.seed = seed;
    if (max_len > 0) opts.generator.max_successor_len = max_len;
    opts.jobs = jobs;
    if (time_limit_s > 0)
        opts.per_instance_time_ms = static_cast<std::int64_t>(time_limit_s * 1000);
    if (sequence_budget > 0) opts.sequence_budget = sequence_budget;
    BenchmarkReport report = run_benchmark(sizes, count, opts);
    if (format == "json")
        std::cout << format_benchmark_json(report);
    else
        std::cout << format_benchmark_text(report);
    return 0;
}

int cmd_tune(const std::string& encoding, const std::string& suite_dir, std::uint64_t seed,
             double time_limit_s) {
    Scheme scheme = parse_scheme(encoding);
    std::vector<DevSequence> suite;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(suite_dir))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        try {
            suite.push_back(parse_sequence(read_file(path.string()), std::nullopt));
        } catch (const InputError&) {
            // not a sequence file; skip
        }
    }
    if (suite.empty()) throw InputError("no sequence files in " + suite_dir);

    std::int64_t per_run_ms =
        time_limit_s > 0 ? static_cast<std::int64_t>(time_limit_s * 1000) : 10'000;
    auto trial = [&](const GAConfig& cfg) {
        TrialOutcome outcome;
        auto t0 = std::chrono::steady_clock::now();
        for (const DevSequence& rho : suite) {
            InferOptions opts;
            opts.scheme = scheme;
            GAConfig ga = cfg;
            ga.seed = seed;
            ga.time_limit_ms = per_run_ms;
            opts.ga = ga;
            opts.total_time_ms = per_run_ms;
            InferResult result = infer(rho, opts);
            outcome.fitness_sum += result.status == InferStatus::Found ? 0.0 : 1.0;
        }
        outcome.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
        return outcome;
    };
    GAConfig tuned = hyperparameter_search(trial, scheme, seed);
    std::cout << "population: " << tuned.population << "\n"
              << "crossover: " << tuned.crossover << "\n"
              << "mutation: " << tuned.mutation << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"D0L-system inductive inference toolkit"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    // infer
    auto* infer_cmd = app.add_subcommand("infer", "infer a D0L-system from a sequence file");
    std::string infer_file, infer_encoding = "ml";
    std::optional<std::string> infer_constants;
    std::string constants_raw;
    bool constants_set = false, lifo = false, dump_bounds = false;
    double total_time_s = 0;
    GAFlags ga_flags;
    infer_cmd->add_option("file", infer_file, "sequence file, one word per line")->required();
    infer_cmd->add_option("--encoding", infer_encoding,
                          "encoding scheme: osos1, osos2, g, l, mg, ml");
    infer_cmd->add_option("--constants", constants_raw, "constant glyphs (default: turtle glyphs present)")
        ->each([&](const std::string&) { constants_set = true; });
    infer_cmd->add_option("--total-time-limit", total_time_s, "overall time limit in seconds");
    infer_cmd->add_flag("--lifo", lifo, "depth-first queue discipline");
    infer_cmd->add_flag("--dump-bounds", dump_bounds, "dump deduction state to stderr");
    ga_flags.attach(infer_cmd);

    // derive
    auto* derive_cmd = app.add_subcommand("derive", "derive a developmental sequence");
    std::string derive_file;
    std::size_t steps = 0;
    derive_cmd->add_option("file", derive_file, "L-system file")->required();
    derive_cmd->add_option("--steps", steps, "number of derivation steps")->required();

    // generate
    auto* gen_cmd = app.add_subcommand("generate", "generate random D0L-systems");
    int gen_size = 2, gen_count = 1, gen_max_len = 0;
    std::uint64_t gen_seed = default_seed();
    std::string gen_out = ".", gen_constants = "[]+-F";
    gen_cmd->add_option("--size", gen_size, "number of nonconstant symbols")->required();
    gen_cmd->add_option("--count", gen_count, "how many systems");
    gen_cmd->add_option("--seed", gen_seed, "random seed");
    gen_cmd->add_option("--out", gen_out, "output directory");
    gen_cmd->add_option("--max-len", gen_max_len, "max successor length");
    gen_cmd->add_option("--constants", gen_constants, "constant glyph set");

    // benchmark
    auto* bench_cmd = app.add_subcommand("benchmark", "generate-and-infer benchmark campaign");
    std::vector<int> bench_sizes;
    int bench_count = 10, bench_jobs = 1, bench_max_len = 0;
    std::uint64_t bench_seed = default_seed();
    double bench_time_s = 0;
    std::int64_t bench_budget = 0;
    std::string bench_encoding = "ml", bench_format = "text";
    bench_cmd->add_option("--sizes", bench_sizes, "nonconstant counts")->required()
        ->delimiter(',');
    bench_cmd->add_option("--count", bench_count, "instances per size");
    bench_cmd->add_option("--encoding", bench_encoding, "encoding scheme");
    bench_cmd->add_option("--seed", bench_seed, "master seed");
    bench_cmd->add_option("--jobs", bench_jobs, "concurrent instances");
    bench_cmd->add_option("--time-limit", bench_time_s, "per-instance limit in seconds");
    bench_cmd->add_option("--budget", bench_budget, "sequence symbol budget");
    bench_cmd->add_option("--max-len", bench_max_len, "generator max successor length");
    bench_cmd->add_option("--format", bench_format, "text or json");

    // tune
    auto* tune_cmd = app.add_subcommand("tune", "hyperparameter random search");
    std::string tune_encoding = "ml", tune_suite;
    std::uint64_t tune_seed = default_seed();
    double tune_time_s = 0;
    tune_cmd->add_option("--encoding", tune_encoding, "encoding scheme");
    tune_cmd->add_option("--suite", tune_suite, "directory of sequence files")->required();
    tune_cmd->add_option("--seed", tune_seed, "random seed");
    tune_cmd->add_option("--time-limit", tune_time_s, "per-inference limit in seconds");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*infer_cmd) {
            if (constants_set) infer_constants = constants_raw;
            return cmd_infer(infer_file, infer_encoding, infer_constants, ga_flags,
                             total_time_s, lifo, dump_bounds);
        }
        if (*derive_cmd) return cmd_derive(derive_file, steps);
        if (*gen_cmd)
            return cmd_generate(gen_size, gen_count, gen_seed, gen_out, gen_max_len,
                                gen_constants);
        if (*bench_cmd)
            return cmd_benchmark(bench_sizes, bench_count, bench_encoding, bench_seed,
                                 bench_jobs, bench_time_s, bench_budget, bench_max_len,
                                 bench_format);
        if (*tune_cmd) return cmd_tune(tune_encoding, tune_suite, tune_seed, tune_time_s);
    } catch (const lsinfer::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

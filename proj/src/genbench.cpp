#include "lsinfer/genbench.hpp"

#include <algorithm>
#include <atomic>
#include <random>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace lsinfer {

namespace {

const std::string kNonconstantPool = [] {
    std::string pool;
    for (char c = 'A'; c <= 'Z'; ++c)
        if (c != 'F') pool.push_back(c);
    for (char c = 'a'; c <= 'z'; ++c)
        if (c != 'f') pool.push_back(c);
    for (char c = '0'; c <= '9'; ++c) pool.push_back(c);
    return pool;
}();

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    // splitmix64 over the tuple
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (a + 1) + 0xbf58476d1ce4e5b9ULL * (b + 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

}  // namespace

LSystem generate_lsystem(const GeneratorConfig& cfg) {
    if (cfg.nonconstants < 1) throw InputError("generator needs at least one nonconstant");
    if (cfg.nonconstants > static_cast<int>(kNonconstantPool.size()))
        throw InputError("generator alphabet limited to " +
                         std::to_string(kNonconstantPool.size()) + " nonconstants");
    std::string glyphs = kNonconstantPool.substr(0, cfg.nonconstants) + cfg.constant_glyphs;
    auto alpha = Alphabet::make(glyphs, cfg.constant_glyphs);
    std::size_t nv = alpha->nonconstant_count();

    std::vector<SymbolId> direction_symbols;
    std::vector<SymbolId> plain_constants;  // anything but brackets
    for (SymbolId c : alpha->constants()) {
        char g = alpha->glyph(c);
        if (g == '[' || g == ']') continue;
        plain_constants.push_back(c);
        if (std::string_view("+-&^\\/|").find(g) != std::string_view::npos)
            direction_symbols.push_back(c);
    }
    bool can_branch = alpha->has_brackets() && !direction_symbols.empty();

    std::mt19937_64 rng(cfg.seed);
    auto uniform = [&](std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    };
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
        Word axiom;
        std::size_t axiom_len = 1 + uniform(static_cast<std::size_t>(cfg.max_axiom_len));
        for (std::size_t i = 0; i < axiom_len; ++i)
            axiom.push_back(static_cast<SymbolId>(uniform(nv)));

        std::vector<Word> productions(alpha->size());
        for (SymbolId c : alpha->constants()) productions[c] = Word{c};
        for (std::size_t a = 0; a < nv; ++a) {
            std::size_t target = 1 + uniform(static_cast<std::size_t>(cfg.max_successor_len));
            Word w;
            int run = 0, open = 0;
            while (w.size() < target) {
                double p = std::max(0.0, cfg.base_nonconstant_prob -
                                             cfg.consecutive_decay * run);
                bool have_constants = !plain_constants.empty() || can_branch || open > 0;
                if (!have_constants || coin(rng) < p) {
                    w.push_back(static_cast<SymbolId>(uniform(nv)));
                    ++run;
                    continue;
                }
                run = 0;
                std::vector<SymbolId> pool = plain_constants;
                if (can_branch) pool.push_back(static_cast<SymbolId>(alpha->open_bracket()));
                if (open > 0) pool.push_back(static_cast<SymbolId>(alpha->close_bracket()));
                SymbolId pick = pool[uniform(pool.size())];
                if (static_cast<int>(pick) == alpha->open_bracket()) {
                    w.push_back(pick);
                    w.push_back(direction_symbols[uniform(direction_symbols.size())]);
                    ++open;
                } else if (static_cast<int>(pick) == alpha->close_bracket()) {
                    w.push_back(pick);
                    --open;
                } else {
                    w.push_back(pick);
                }
            }
            while (open-- > 0) w.push_back(static_cast<SymbolId>(alpha->close_bracket()));
            productions[a] = std::move(w);
        }

        // validation: every nonconstant occurs within the first nv words
        LSystem sys;
        sys.alphabet = alpha;
        sys.axiom = axiom;
        sys.productions = productions;
        std::vector<char> seen(nv, 0);
        std::int64_t seen_count = 0, total = 0;
        Word current = axiom;
        bool valid = false, overflow = false;
        for (std::size_t step = 0; step < nv && !valid && !overflow; ++step) {
            // `current` is word step+1 of the sequence
            for (SymbolId s : current) {
                if (s < nv && !seen[s]) {
                    seen[s] = 1;
                    ++seen_count;
                }
            }
            if (seen_count == static_cast<std::int64_t>(nv)) {
                valid = true;
                break;
            }
            if (step + 1 >= nv) break;
            std::int64_t next_len = 0;
            for (SymbolId s : current) next_len += productions[s].size();
            total += next_len;
            if (total > cfg.validation_budget) {
                overflow = true;
                break;
            }
            current = derive_step(sys, current);
        }
        if (valid) return make_lsystem(alpha, std::move(axiom), std::move(productions));
    }
    throw InputError("generator failed to produce a valid system within the retry limit");
}

DevSequence derive_budgeted(const LSystem& sys, std::size_t steps, std::int64_t budget) {
    std::size_t nv = sys.alphabet->nonconstant_count();
    DevSequence rho;
    rho.alphabet = sys.alphabet;
    rho.words.push_back(sys.axiom);
    std::int64_t total = static_cast<std::int64_t>(sys.axiom.size());
    std::vector<char> seen_source(nv, 0);
    std::size_t source_seen = 0;

    for (std::size_t i = 0; i < steps; ++i) {
        // words[0..size-1] become source words once one more word is added
        for (SymbolId s : rho.words.back()) {
            if (s < nv && !seen_source[s]) {
                seen_source[s] = 1;
                ++source_seen;
            }
        }
        bool covered = rho.words.size() >= 2 && source_seen == nv;
        std::int64_t next_len = 0;
        for (SymbolId s : rho.words.back())
            next_len += static_cast<std::int64_t>(sys.productions[s].size());
        if (covered && total + next_len > budget) break;
        if (total + next_len > 16 * budget) break;  // runaway guard
        rho.words.push_back(derive_step(sys, rho.words.back()));
        total += next_len;
    }
    return rho;
}

namespace {

std::vector<double> fit_polynomial(const std::vector<std::pair<double, double>>& points,
                                   int degree) {
    int terms = degree + 1;
    std::vector<std::vector<double>> ata(terms, std::vector<double>(terms, 0));
    std::vector<double> atb(terms, 0);
    for (auto [x, y] : points) {
        std::vector<double> powers(terms, 1);
        for (int t = 1; t < terms; ++t) powers[t] = powers[t - 1] * x;
        for (int r = 0; r < terms; ++r) {
            atb[r] += powers[r] * y;
            for (int c = 0; c < terms; ++c) ata[r][c] += powers[r] * powers[c];
        }
    }
    // gaussian elimination with partial pivoting
    std::vector<double> coeffs(terms, 0);
    for (int col = 0; col < terms; ++col) {
        int pivot = col;
        for (int r = col + 1; r < terms; ++r)
            if (std::abs(ata[r][col]) > std::abs(ata[pivot][col])) pivot = r;
        std::swap(ata[col], ata[pivot]);
        std::swap(atb[col], atb[pivot]);
        if (std::abs(ata[col][col]) < 1e-12) return {};
        for (int r = 0; r < terms; ++r) {
            if (r == col) continue;
            double f = ata[r][col] / ata[col][col];
            for (int c = col; c < terms; ++c) ata[r][c] -= f * ata[col][c];
            atb[r] -= f * atb[col];
        }
    }
    for (int t = 0; t < terms; ++t) coeffs[t] = atb[t] / ata[t][t];
    return coeffs;
}

}  // namespace

BenchmarkReport run_benchmark(const std::vector<int>& sizes, int count,
                              const BenchmarkOptions& options) {
    BenchmarkReport report;
    struct Task {
        int id, size;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (std::size_t si = 0; si < sizes.size(); ++si)
        for (int c = 0; c < count; ++c)
            tasks.push_back(Task{static_cast<int>(tasks.size()), sizes[si],
                                 mix_seed(options.generator.seed, si, c)});
    report.records.resize(tasks.size());

    auto run_one = [&](const Task& task) {
        GeneratorConfig gen = options.generator;
        gen.nonconstants = task.size;
        gen.seed = task.seed;
        BenchmarkRecord rec;
        rec.id = task.id;
        rec.size = task.size;
        rec.scheme = options.scheme;
        rec.seed = task.seed;
        try {
            LSystem sys = generate_lsystem(gen);
            DevSequence rho = derive_budgeted(sys, static_cast<std::size_t>(task.size),
                                              options.sequence_budget);
            InferOptions opts;
            opts.scheme = options.scheme;
            GAConfig ga = default_ga_config(options.scheme);
            ga.seed = task.seed;
            ga.time_limit_ms = options.per_instance_time_ms;
            opts.ga = ga;
            opts.total_time_ms = options.per_instance_time_ms;
            auto t0 = std::chrono::steady_clock::now();
            InferResult result = infer(rho, opts);
            rec.ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
            rec.generations = result.generations;
            rec.solved = result.status == InferStatus::Found && result.system &&
                         is_compatible(*result.system, rho);
        } catch (const InputError&) {
            rec.solved = false;
        }
        report.records[task.id] = rec;
    };

    int jobs = std::max(1, options.jobs);
    if (jobs == 1) {
        for (const Task& t : tasks) run_one(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        for (int j = 0; j < jobs; ++j) {
            workers.emplace_back([&] {
                while (true) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= tasks.size()) return;
                    run_one(tasks[i]);
                }
            });
        }
        for (auto& w : workers) w.join();
    }

    std::vector<std::pair<double, double>> points;
    for (int size : sizes) {
        BenchmarkSummary s;
        s.size = size;
        for (const BenchmarkRecord& r : report.records) {
            if (r.size != size) continue;
            ++s.count;
            if (r.solved) s.success_rate += 1;
            s.mtts_ms += static_cast<double>(r.ms);
        }
        if (s.count > 0) {
            s.success_rate = 100.0 * s.success_rate / s.count;
            s.mtts_ms /= s.count;
        }
        points.emplace_back(size, s.mtts_ms);
        report.summaries.push_back(s);
    }
    if (points.size() >= 2)
        report.trend = fit_polynomial(points, std::min<int>(3, static_cast<int>(points.size()) - 1));
    return report;
}

std::string format_benchmark_text(const BenchmarkReport& report) {
    std::ostringstream out;
    out << "id\tsize\tscheme\tsolved\tms\tgenerations\tseed\n";
    for (const BenchmarkRecord& r : report.records)
        out << r.id << '\t' << r.size << '\t' << scheme_name(r.scheme) << '\t'
            << (r.solved ? 1 : 0) << '\t' << r.ms << '\t' << r.generations << '\t' << r.seed
            << '\n';
    out << "# summary\n";
    for (const BenchmarkSummary& s : report.summaries)
        out << "# size=" << s.size << " count=" << s.count << " SR=" << s.success_rate
            << "% MTTS=" << s.mtts_ms << "ms\n";
    if (!report.trend.empty()) {
        out << "# trend:";
        for (std::size_t i = 0; i < report.trend.size(); ++i)
            out << " c" << i << "=" << report.trend[i];
        out << "\n";
    }
    return out.str();
}

std::string format_benchmark_json(const BenchmarkReport& report) {
    nlohmann::json j;
    j["records"] = nlohmann::json::array();
    for (const BenchmarkRecord& r : report.records)
        j["records"].push_back({{"id", r.id},
                                {"size", r.size},
                                {"scheme", std::string(scheme_name(r.scheme))},
                                {"solved", r.solved},
                                {"ms", r.ms},
                                {"generations", r.generations},
                                {"seed", r.seed}});
    j["summaries"] = nlohmann::json::array();
    for (const BenchmarkSummary& s : report.summaries)
        j["summaries"].push_back({{"size", s.size},
                                  {"count", s.count},
                                  {"success_rate", s.success_rate},
                                  {"mtts_ms", s.mtts_ms}});
    j["trend"] = report.trend;
    return j.dump(2) + "\n";
}

}  // namespace lsinfer

#include "lsinfer/ga.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

namespace lsinfer {

GAConfig default_ga_config(Scheme scheme) {
    GAConfig cfg;
    switch (scheme) {
        case Scheme::OSOS1: cfg.population = 110; cfg.crossover = 0.80; cfg.mutation = 0.17; break;
        case Scheme::OSOS2: cfg.population = 105; cfg.crossover = 0.80; cfg.mutation = 0.14; break;
        case Scheme::G:     cfg.population = 90;  cfg.crossover = 0.85; cfg.mutation = 0.07; break;
        case Scheme::MG:    cfg.population = 95;  cfg.crossover = 0.90; cfg.mutation = 0.09; break;
        case Scheme::L:     cfg.population = 105; cfg.crossover = 0.85; cfg.mutation = 0.10; break;
        case Scheme::ML:    cfg.population = 100; cfg.crossover = 0.85; cfg.mutation = 0.10; break;
    }
    return cfg;
}

std::string_view termination_name(Termination t) {
    switch (t) {
        case Termination::Solved: return "solved";
        case Termination::Converged: return "converged";
        case Termination::Timeout: return "timeout";
    }
    return "?";
}

FitnessValue fitness_table(const std::vector<std::optional<Word>>& successors,
                           const std::vector<Word>& words) {
    std::size_t n = words.size();
    Word current = words.front();
    for (std::size_t i = 1; i < n; ++i) {
        const Word& expected = words[i];
        std::int64_t cap = 2 * static_cast<std::int64_t>(expected.size());
        auto derived = derive_step_table(successors, current, cap);
        if (!derived) return kMaxFitness;
        std::size_t cp = 0;
        std::size_t limit = std::min(derived->size(), expected.size());
        while (cp < limit && (*derived)[cp] == expected[cp]) ++cp;
        std::size_t errors = std::max(derived->size(), expected.size()) - cp;
        if (errors > 0)
            return static_cast<double>(errors) / static_cast<double>(expected.size()) +
                   static_cast<double>(n - 1 - i);
        current = std::move(*derived);
    }
    return 0.0;
}

FitnessValue fitness(const LSystem& candidate, const DevSequence& rho) {
    std::vector<std::optional<Word>> table(candidate.productions.size());
    for (std::size_t i = 0; i < candidate.productions.size(); ++i)
        table[i] = candidate.productions[i];
    return fitness_table(table, rho.words);
}

namespace {

struct Member {
    Genome genome;
    FitnessValue fit = kMaxFitness;
    std::string key;
};

bool member_order(const Member& a, const Member& b) {
    if (a.fit != b.fit) return a.fit < b.fit;
    if (a.key != b.key) return a.key < b.key;
    return a.genome < b.genome;
}

class Search {
public:
    Search(const EncodingInstance& space, const GAConfig& cfg, Deadline deadline)
        : space_(space), cfg_(cfg), deadline_(deadline), rng_(cfg.seed) {}

    SearchReport run() {
        auto start = std::chrono::steady_clock::now();
        SearchReport report;
        if (space_.feasible()) {
            auto size = space_.space_size();
            std::uint64_t threshold =
                std::max<std::uint64_t>(4 * static_cast<std::uint64_t>(cfg_.population), 1024);
            if (size && *size <= threshold)
                exhaustive(report);
            else
                evolve(report);
        }
        report.best = best_;
        report.solutions = std::move(solutions_);
        if (!report.solutions.empty()) report.termination = Termination::Solved;
        report.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
        return report;
    }

private:
    void note(const Genome& genome, const std::optional<DecodedCandidate>& decoded,
              FitnessValue fit) {
        best_ = std::min(best_, fit);
        if (fit == 0.0 && decoded) {
            std::string key = space_.solution_key(decoded, genome);
            if (seen_solutions_.insert(key).second)
                solutions_.push_back(FoundSolution{decoded->successors, genome});
        }
    }

    Member make_member(Genome genome) {
        Member m;
        auto decoded = space_.decode(genome);
        m.fit = decoded ? fitness_table(decoded->successors, space_.words()) : kMaxFitness;
        m.key = space_.solution_key(decoded, genome);
        note(genome, decoded, m.fit);
        m.genome = std::move(genome);
        return m;
    }

    Genome random_genome() {
        Genome g;
        if (space_.uses_reals()) {
            g.reals.resize(space_.gene_count());
            for (double& r : g.reals) r = real_dist_(rng_);
        } else {
            g.ints.resize(space_.gene_count());
            const auto& ranges = space_.int_ranges();
            for (std::size_t i = 0; i < g.ints.size(); ++i)
                g.ints[i] = std::uniform_int_distribution<std::int64_t>(
                    ranges[i].lo, ranges[i].hi)(rng_);
        }
        return g;
    }

    void mutate_gene(Genome& g, std::size_t idx) {
        if (space_.uses_reals()) {
            g.reals[idx] = real_dist_(rng_);
        } else {
            const GeneRange& r = space_.int_ranges()[idx];
            g.ints[idx] = std::uniform_int_distribution<std::int64_t>(r.lo, r.hi)(rng_);
        }
    }

    void exhaustive(SearchReport& report) {
        report.generations = 0;
        std::size_t genes = space_.gene_count();
        if (space_.uses_reals() && genes > 0) return;  // not enumerable
        Genome g;
        g.ints.assign(genes, 0);
        const auto& ranges = space_.int_ranges();
        for (std::size_t i = 0; i < genes; ++i) g.ints[i] = ranges[i].lo;
        int tick = 0;
        while (true) {
            auto decoded = space_.decode(g);
            FitnessValue fit =
                decoded ? fitness_table(decoded->successors, space_.words()) : kMaxFitness;
            note(g, decoded, fit);
            if (++tick % 256 == 0 && deadline_.expired()) {
                report.termination = Termination::Timeout;
                return;
            }
            std::size_t i = 0;
            for (; i < genes; ++i) {
                if (g.ints[i] < ranges[i].hi) {
                    ++g.ints[i];
                    break;
                }
                g.ints[i] = ranges[i].lo;
            }
            if (i == genes) break;
        }
        report.termination = Termination::Converged;
    }

    void evolve(SearchReport& report) {
        const int P = std::max(cfg_.population, 2);
        std::vector<Member> pop;
        std::set<std::string> pop_keys;
        int attempts = 0;
        while (static_cast<int>(pop.size()) < P && attempts < 60 * P) {
            ++attempts;
            Member m = make_member(random_genome());
            if (pop_keys.contains(m.key)) continue;
            pop_keys.insert(m.key);
            pop.push_back(std::move(m));
            if (deadline_.expired()) break;
        }
        if (pop.empty()) {
            report.termination = Termination::Converged;
            return;
        }
        std::sort(pop.begin(), pop.end(), member_order);

        std::int64_t gen = 0, best_gen = 0;
        FitnessValue best_seen = pop.front().fit;
        while (true) {
            if (!solutions_.empty()) {
                report.termination = Termination::Solved;
                break;
            }
            if (deadline_.expired()) {
                report.termination = Termination::Timeout;
                break;
            }
            if (gen >= cfg_.min_generations && (gen - best_gen) >= best_gen) {
                report.termination = Termination::Converged;
                break;
            }

            // roulette selection of unrepeated pairs
            std::vector<double> cumulative(pop.size());
            double total = 0;
            for (std::size_t i = 0; i < pop.size(); ++i) {
                double w = pop[i].fit == kMaxFitness ? 1e-12 : 1.0 / (1.0 + pop[i].fit);
                total += w;
                cumulative[i] = total;
            }
            auto spin = [&]() {
                double x = real_dist_(rng_) * total;
                return static_cast<std::size_t>(
                    std::lower_bound(cumulative.begin(), cumulative.end(), x) -
                    cumulative.begin());
            };
            std::size_t target_pairs = (static_cast<std::size_t>(P) + 1) / 2;
            std::set<std::pair<std::size_t, std::size_t>> used;
            std::vector<std::pair<std::size_t, std::size_t>> pairs;
            int pair_attempts = 0;
            while (pairs.size() < target_pairs &&
                   pair_attempts < 30 * static_cast<int>(target_pairs)) {
                ++pair_attempts;
                if (pop.size() < 2) break;
                std::size_t a = spin();
                std::size_t b = spin();
                if (a == b) continue;
                auto key = std::minmax(a, b);
                if (!used.insert(key).second) continue;
                pairs.push_back(key);
            }

            std::vector<Member> children;
            auto add_child = [&](Genome g, bool touched) {
                if (!touched) mutate_gene(g, std::uniform_int_distribution<std::size_t>(
                                                 0, space_.gene_count() - 1)(rng_));
                children.push_back(make_member(std::move(g)));
            };
            if (pairs.empty()) {
                // population too uniform to pair; keep searching by mutation
                for (int i = 0; i < P; ++i) {
                    std::size_t a = spin();
                    Genome g = pop[a].genome;
                    add_child(std::move(g), false);
                }
            } else {
                for (auto [a, b] : pairs) {
                    Genome c1 = pop[a].genome, c2 = pop[b].genome;
                    bool touched1 = false, touched2 = false;
                    for (std::size_t i = 0; i < space_.gene_count(); ++i) {
                        if (real_dist_(rng_) < cfg_.crossover) {
                            if (space_.uses_reals()) std::swap(c1.reals[i], c2.reals[i]);
                            else std::swap(c1.ints[i], c2.ints[i]);
                            touched1 = touched2 = true;
                        }
                    }
                    for (std::size_t i = 0; i < space_.gene_count(); ++i) {
                        if (real_dist_(rng_) < cfg_.mutation) {
                            mutate_gene(c1, i);
                            touched1 = true;
                        }
                        if (real_dist_(rng_) < cfg_.mutation) {
                            mutate_gene(c2, i);
                            touched2 = true;
                        }
                    }
                    add_child(std::move(c1), touched1);
                    add_child(std::move(c2), touched2);
                }
            }

            // elite survival with duplicate culling
            for (Member& m : children) pop.push_back(std::move(m));
            std::sort(pop.begin(), pop.end(), member_order);
            std::vector<Member> next;
            std::set<std::string> next_keys;
            for (Member& m : pop) {
                if (static_cast<int>(next.size()) >= P) break;
                if (!next_keys.insert(m.key).second) continue;
                next.push_back(std::move(m));
            }
            pop = std::move(next);
            ++gen;
            if (pop.front().fit < best_seen) {
                best_seen = pop.front().fit;
                best_gen = gen;
            }
        }
        report.generations = gen;
    }

    const EncodingInstance& space_;
    const GAConfig& cfg_;
    Deadline deadline_;
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> real_dist_{0.0, 1.0};

    FitnessValue best_ = kMaxFitness;
    std::vector<FoundSolution> solutions_;
    std::set<std::string> seen_solutions_;
};

}  // namespace

SearchReport run_ga(const EncodingInstance& space, const GAConfig& cfg, Deadline global) {
    Deadline deadline = global.enabled ? global.tightened(cfg.time_limit_ms)
                                       : Deadline::in_ms(cfg.time_limit_ms);
    Search search(space, cfg, deadline);
    return search.run();
}

// ---- hyperparameter random search -------------------------------------------

namespace {

const std::vector<double>& mutation_ladder() {
    static const std::vector<double> ladder = [] {
        std::vector<double> v{0.0001, 0.001};
        for (int i = 1; i <= 20; ++i) v.push_back(i / 100.0);
        return v;
    }();
    return ladder;
}

int nearest_index(const std::vector<double>& ladder, double value) {
    int best = 0;
    for (std::size_t i = 1; i < ladder.size(); ++i)
        if (std::abs(ladder[i] - value) < std::abs(ladder[best] - value))
            best = static_cast<int>(i);
    return best;
}

}  // namespace

GAConfig hyperparameter_search(const std::function<TrialOutcome(const GAConfig&)>& trial,
                               Scheme scheme, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> step(-2, 2);
    const auto& mut = mutation_ladder();

    // ladders: P in 10..125 by 5, C in 0.60..0.95 by 0.05, M per ladder above
    int p_idx = (60 - 10) / 5, c_idx = 4, m_idx = nearest_index(mut, 0.10);
    auto config_at = [&](int pi, int ci, int mi) {
        GAConfig cfg = default_ga_config(scheme);
        cfg.population = 10 + 5 * pi;
        cfg.crossover = 0.60 + 0.05 * ci;
        cfg.mutation = mut[mi];
        return cfg;
    };
    auto clamp = [](int v, int lo, int hi) { return std::max(lo, std::min(hi, v)); };

    TrialOutcome current = trial(config_at(p_idx, c_idx, m_idx));
    bool improved = true;
    while (improved) {
        improved = false;
        for (int t = 0; t < 16; ++t) {
            int pi = clamp(p_idx + step(rng), 0, 23);
            int ci = clamp(c_idx + step(rng), 0, 7);
            int mi = clamp(m_idx + step(rng), 0, static_cast<int>(mut.size()) - 1);
            TrialOutcome outcome = trial(config_at(pi, ci, mi));
            bool better = outcome.fitness_sum < current.fitness_sum ||
                          (outcome.fitness_sum == current.fitness_sum &&
                           outcome.wall_ms < current.wall_ms);
            if (better) {
                current = outcome;
                p_idx = pi;
                c_idx = ci;
                m_idx = mi;
                improved = true;
            }
        }
    }
    return config_at(p_idx, c_idx, m_idx);
}

}  // namespace lsinfer

#include "desync/verify.hpp"

#include "desync/engine.hpp"
#include "desync/scenario.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <type_traits>
#include <random>

namespace desync
{
    namespace
    {
        // Property names, in report order.
        constexpr const char *kPrcRaises = "prc_raises_within_interval";
        constexpr const char *kPrcIdentity = "prc_identity_outside_interval";
        constexpr const char *kPrcMonotone = "prc_monotone";
        constexpr const char *kPrcContinuous = "prc_continuous_at_slot";
        constexpr const char *kPrcContraction = "prc_geometric_contraction";
        constexpr const char *kEngineCompletes = "engine_invariants_hold";
        constexpr const char *kTimesIncrease = "event_times_increase";
        constexpr const char *kFiringOrder = "firing_order_invariance";
        constexpr const char *kNoOvertaking = "no_overtaking";
        constexpr const char *kNoSpuriousFires = "listener_updates_follow_prc";
        constexpr const char *kRingSum = "ring_gaps_sum_to_2pi";
        constexpr const char *kDeterminism = "determinism";
        constexpr const char *kOracle = "delta_p_matches_closed_form";
        constexpr const char *kMonotoneP = "p_non_increasing";
        constexpr const char *kStrictDecrease = "p_strictly_decreases_case1_case2";
        constexpr const char *kNoFourthCase = "no_fourth_case";
        constexpr const char *kSilentBound = "silent_run_below_n";
        constexpr const char *kPNonNegative = "p_non_negative";
        constexpr const char *kAdvanceInvariance = "p_invariant_under_advance";
        constexpr const char *kConvergence = "distinct_phase_convergence";
        constexpr const char *kIdentical = "identical_phase_resolution";
        constexpr const char *kCoverage = "case_coverage";

        constexpr double kOracleTol = 1e-9;
        constexpr double kMonotoneSlack = 1e-12;
        constexpr double kRingSumTol = 1e-9;
        constexpr double kAdvanceTol = 1e-12;
        constexpr double kContractionRelTol = 1e-12;
        // Rounding floor for the distance to slot: a phase near slot cannot
        // resolve distances much below its own ulp.
        constexpr double kContractionAbsTol = 1e-14;
        constexpr double kIdenticalThreshold = 1e-3;
        constexpr int kConvergenceBudgetFactor = 10;

        struct Cell
        {
            int n;
            double l;
        };

        class Suite
        {
        public:
            Suite()
            {
                for (const char *name : {kPrcRaises, kPrcIdentity, kPrcMonotone, kPrcContinuous, kPrcContraction,
                                         kEngineCompletes, kTimesIncrease, kFiringOrder, kNoOvertaking,
                                         kNoSpuriousFires, kRingSum, kDeterminism, kOracle, kMonotoneP,
                                         kStrictDecrease, kNoFourthCase, kSilentBound, kPNonNegative,
                                         kAdvanceInvariance, kConvergence, kIdentical, kCoverage})
                {
                    keys_.push_back(name);
                    results_.push_back(PropertyResult{name, 0, 0, std::nullopt});
                }
            }

            // `describe` only runs on the first failure of a property.
            template <typename Describe>
            void check(const char *name, bool ok, Describe &&describe)
            {
                PropertyResult &r = find(name);
                ++r.checks;
                if (!ok && r.failures++ == 0)
                    r.first_failure = describe();
            }

            void pass(const char *name) { ++find(name).checks; }

            std::vector<PropertyResult> take() { return std::move(results_); }

        private:
            PropertyResult &find(const char *name)
            {
                // Names are the k* constants, so pointer identity is enough.
                for (std::size_t i = 0; i < keys_.size(); ++i)
                {
                    if (keys_[i] == name)
                        return results_[i];
                }
                throw std::logic_error(std::string("unknown property ") + name);
            }

            std::vector<const char *> keys_;
            std::vector<PropertyResult> results_;
        };

        PrcConfig make_prc(const VerifyOptions &opt, int n, double l)
        {
            return opt.inject_inverted_prc ? PrcConfig::with_inverted_response(n, l) : PrcConfig(n, l);
        }

        void check_prc_laws(Suite &suite, const VerifyOptions &opt, const Cell &cell, std::mt19937_64 &rng)
        {
            const PrcConfig cfg = make_prc(opt, cell.n, cell.l);
            const double slot = cfg.slot();
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            auto where = [&cell](auto detail) {
                return [&cell, detail] { return Counterexample{0, cell.n, cell.l, -1, detail()}; };
            };

            for (int s = 0; s < opt.fuzz_samples; ++s)
            {
                const double phi = unit(rng) * slot;
                const double next = apply_prc(canonicalize(phi), cfg).value();
                suite.check(kPrcRaises, next > phi && next < slot,
                            where([&] { return fmt::format("phi={:.17g} -> {:.17g}", phi, next); }));

                const double outside = std::min(slot + unit(rng) * (kTwoPi - slot), std::nextafter(kTwoPi, 0.0));
                const double kept = apply_prc(canonicalize(outside), cfg).value();
                suite.check(kPrcIdentity, kept == outside,
                            where([&] { return fmt::format("phi={:.17g} -> {:.17g}", outside, kept); }));

                double a = unit(rng) * slot;
                double b = unit(rng) * slot;
                if (a > b)
                    std::swap(a, b);
                if (a < b)
                {
                    const double fa = apply_prc(canonicalize(a), cfg).value();
                    const double fb = apply_prc(canonicalize(b), cfg).value();
                    suite.check(kPrcMonotone, fa < fb,
                                where([&] { return fmt::format("{:.17g} < {:.17g} but images {:.17g}, {:.17g}", a, b, fa, fb); }));
                }

                PhaseAngle x = canonicalize(unit(rng) * slot);
                const double d0 = slot - x.value();
                for (int k = 1; k <= 50; ++k)
                {
                    x = apply_prc(x, cfg);
                    const double measured = std::abs(x.value() - slot);
                    const double predicted = std::pow(1.0 - cfg.l(), k) * d0;
                    const double err = std::abs(measured - predicted);
                    suite.check(kPrcContraction, err <= kContractionRelTol * predicted + kContractionAbsTol,
                                where([&] { return fmt::format("k={} distance {:.17g}, expected {:.17g}", k, measured, predicted); }));
                }
            }

            const double at = prc_response(canonicalize(slot), cfg);
            const double below = prc_response(canonicalize(std::nextafter(slot, 0.0)), cfg);
            suite.check(kPrcContinuous, at == 0.0 && std::abs(below) <= 1e-15,
                        where([&] { return fmt::format("F(slot)={:.17g}, F(slot-)={:.17g}", at, below); }));
        }

        bool same_events(const std::vector<PulseEvent> &a, const std::vector<PulseEvent> &b)
        {
            if (a.size() != b.size())
                return false;
            for (std::size_t i = 0; i < a.size(); ++i)
            {
                const PulseEvent &x = a[i];
                const PulseEvent &y = b[i];
                if (x.time != y.time || x.kind != y.kind || x.firers != y.firers ||
                    x.updates.size() != y.updates.size() || x.resets.size() != y.resets.size())
                    return false;
                for (std::size_t k = 0; k < x.updates.size(); ++k)
                {
                    if (x.updates[k].id != y.updates[k].id || x.updates[k].before != y.updates[k].before ||
                        x.updates[k].after != y.updates[k].after)
                        return false;
                }
                for (std::size_t k = 0; k < x.resets.size(); ++k)
                {
                    if (x.resets[k].id != y.resets[k].id || x.resets[k].value != y.resets[k].value)
                        return false;
                }
            }
            return true;
        }

        int cyclic_ascents(const std::vector<double> &phases, const RingOrder &ring)
        {
            int ascents = 0;
            for (std::size_t k = 0; k < ring.size(); ++k)
            {
                const double cur = phases[static_cast<std::size_t>(ring[k].index)];
                const double nxt = phases[static_cast<std::size_t>(ring[(k + 1) % ring.size()].index)];
                ascents += nxt > cur ? 1 : 0;
            }
            return ascents;
        }

        struct RunContext
        {
            std::uint64_t seed;
            Cell cell;

            // `detail` is a string or a callable producing one.
            template <typename Detail>
            auto at(std::int64_t event, Detail detail) const
            {
                return [this, event, detail] {
                    if constexpr (std::is_invocable_v<Detail>)
                        return Counterexample{seed, cell.n, cell.l, event, std::string(detail())};
                    else
                        return Counterexample{seed, cell.n, cell.l, event, std::string(detail)};
                };
            }
        };

        // Checks shared by the distinct and identical corpora.
        void check_events(Suite &suite, const RunContext &ctx, const NetworkState &initial, const RunResult &result,
                          bool single_firers_only, std::map<std::string, std::int64_t> *counts)
        {
            const PrcConfig &cfg = initial.prc();
            const int n = cfg.n();
            RingOrder ring = ring_order(initial.phases());
            double last_time = -1.0;

            for (std::size_t i = 0; i < result.events.size(); ++i)
            {
                const PulseEvent &ev = result.events[i];
                const EventMetrics &m = result.metrics[i];
                const auto idx = static_cast<std::int64_t>(i);

                suite.check(kTimesIncrease, ev.time > last_time,
                            ctx.at(idx, [&] { return fmt::format("time {:.17g} after {:.17g}", ev.time, last_time); }));
                last_time = ev.time;

                // Bookkeeping: each listener once, each firer once, PRC respected.
                bool bookkeeping = ev.updates.size() + ev.firers.size() == static_cast<std::size_t>(n) &&
                                   ev.resets.size() == ev.firers.size();
                for (const PhaseUpdate &u : ev.updates)
                {
                    if (u.before < cfg.slot())
                        bookkeeping = bookkeeping && u.after < cfg.slot() && u.after >= u.before;
                    else
                        bookkeeping = bookkeeping && u.after == u.before;
                    bookkeeping = bookkeeping && u.after < kTwoPi;
                }
                suite.check(kNoSpuriousFires, bookkeeping, ctx.at(idx, "listener update violates the PRC"));

                const std::vector<double> after = ev.phases_after(n);
                if (ev.kind == PulseKind::Collision)
                    ring = ring_order(after);
                const int ascents = cyclic_ascents(after, ring);
                suite.check(kNoOvertaking, ascents <= 1,
                            ctx.at(idx, [&] { return fmt::format("{} ascents along the ring", ascents); }));

                const double gap_sum = m.deltas_after.sum();
                suite.check(kRingSum, std::abs(gap_sum - kTwoPi) <= kRingSumTol,
                            ctx.at(idx, [&] { return fmt::format("gaps sum to {:.17g}", gap_sum); }));
                suite.check(kPNonNegative, m.p_after >= 0.0, ctx.at(idx, "negative P"));

                if (counts)
                {
                    if (ev.kind == PulseKind::Active && m.classification)
                        ++(*counts)[std::string(to_string(*m.classification->active_case))];
                    else
                        ++(*counts)[std::string(to_string(ev.kind))];
                }

                if (ev.kind == PulseKind::Collision)
                {
                    suite.check(kFiringOrder, !single_firers_only, ctx.at(idx, "collision in a distinct-phase run"));
                    continue;
                }

                const double measured = m.p_after - m.p_before;
                suite.check(kOracle, std::abs(*m.predicted_dp - measured) <= kOracleTol,
                            ctx.at(idx, [&] { return fmt::format("predicted {:.17g}, measured {:.17g}", *m.predicted_dp, measured); }));
                suite.check(kMonotoneP, m.p_after <= m.p_before + kMonotoneSlack,
                            ctx.at(idx, [&] { return fmt::format("P rose from {:.17g} to {:.17g}", m.p_before, m.p_after); }));
                if (m.classification->active_case)
                {
                    const ActiveCase c = *m.classification->active_case;
                    suite.check(kNoFourthCase, c != ActiveCase::Case4, ctx.at(idx, "fourth case observed"));
                    if (c == ActiveCase::Case1 || c == ActiveCase::Case2)
                        suite.check(kStrictDecrease, m.p_after < m.p_before,
                                    ctx.at(idx, [&] { return fmt::format("{} left P at {:.17g} -> {:.17g}", to_string(c),
                                                            m.p_before, m.p_after); }));
                }
            }

            suite.check(kSilentBound, silent_run_length(result.metrics) <= n - 1,
                        ctx.at(-1, [&] { return fmt::format("{} consecutive silent pulses", silent_run_length(result.metrics)); }));
        }

        void check_firing_order(Suite &suite, const RunContext &ctx, const RunResult &result, int n)
        {
            // Only the prefix before any collision is covered by the guarantee.
            std::vector<int> firers;
            for (const PulseEvent &ev : result.events)
            {
                if (!ev.single_firer())
                    break;
                firers.push_back(ev.firers.front().index);
            }
            const std::size_t window = std::min(firers.size(), static_cast<std::size_t>(n));
            std::vector<int> first(firers.begin(), firers.begin() + static_cast<std::ptrdiff_t>(window));
            std::sort(first.begin(), first.end());
            const bool distinct = std::adjacent_find(first.begin(), first.end()) == first.end();
            suite.check(kFiringOrder, distinct, ctx.at(0, "first n firers are not distinct"));
            for (std::size_t i = static_cast<std::size_t>(n); i < firers.size(); ++i)
            {
                if (firers[i] != firers[i - static_cast<std::size_t>(n)])
                {
                    suite.check(kFiringOrder, false,
                                ctx.at(static_cast<std::int64_t>(i),
                                       fmt::format("oscillator {} fired where {} was due", firers[i],
                                                   firers[i - static_cast<std::size_t>(n)])));
                    return;
                }
            }
            suite.pass(kFiringOrder);
        }

        void distinct_run(Suite &suite, const VerifyOptions &opt, const Cell &cell, std::uint64_t seed,
                          std::map<std::string, std::int64_t> &counts)
        {
            const RunContext ctx{seed, cell};
            const PrcConfig prc = make_prc(opt, cell.n, cell.l);
            std::mt19937_64 rng(seed);
            std::vector<double> phases = distinct_uniform_phases(cell.n, rng);
            const NetworkState initial(prc, kTwoPi, std::move(phases), rng);

            // P is unchanged by a common rotation.
            {
                DesyncMonitor before(prc, initial.phases());
                const double dt = 0.5 * time_to_next_fire(initial);
                const NetworkState moved = advance(initial, dt);
                const double p_moved = compute_p(compute_deltas(moved.phases(), before.ring()), prc);
                suite.check(kAdvanceInvariance, std::abs(p_moved - before.p()) <= kAdvanceTol,
                            ctx.at(-1, [&] { return fmt::format("P {:.17g} became {:.17g}", before.p(), p_moved); }));
            }

            // slow couplings need well past the default budget
            StopCondition stop = StopCondition::defaults(cell.n);
            stop.max_events *= kConvergenceBudgetFactor;
            std::optional<RunResult> result;
            try
            {
                result = run(initial, stop);
            }
            catch (const InvariantViolation &e)
            {
                suite.check(kEngineCompletes, false, ctx.at(-1, std::string(e.what())));
                return;
            }
            suite.pass(kEngineCompletes);

            check_events(suite, ctx, initial, *result, true, &counts);
            check_firing_order(suite, ctx, *result, cell.n);
            suite.check(kConvergence, result->converged(),
                        ctx.at(-1, [&] { return fmt::format("final P {:.17g} after {} events", result->final_p(),
                                               result->events.size()); }));

            if (seed % 10 == 0)
            {
                const RunResult again = run(initial, stop);
                suite.check(kDeterminism, same_events(result->events, again.events),
                            ctx.at(-1, "rerun produced a different event trace"));
            }
        }

        void identical_run(Suite &suite, const VerifyOptions &opt, const Cell &cell, std::uint64_t seed)
        {
            const RunContext ctx{seed, cell};
            const PrcConfig prc = make_prc(opt, cell.n, cell.l);
            const NetworkState initial(prc, kTwoPi, std::vector<double>(static_cast<std::size_t>(cell.n), std::numbers::pi),
                                       seed);
            StopCondition stop = StopCondition::defaults(cell.n);
            stop.max_events *= 10;
            stop.p_threshold = kIdenticalThreshold;

            std::optional<RunResult> result;
            try
            {
                result = run(initial, stop);
            }
            catch (const InvariantViolation &e)
            {
                suite.check(kEngineCompletes, false, ctx.at(-1, std::string(e.what())));
                return;
            }
            suite.pass(kEngineCompletes);
            check_events(suite, ctx, initial, *result, false, nullptr);
            suite.check(kIdentical, result->converged(),
                        ctx.at(-1, [&] { return fmt::format("final P {:.17g} after {} events", result->final_p(),
                                               result->events.size()); }));

            const RunResult again = run(initial, stop);
            suite.check(kDeterminism, same_events(result->events, again.events),
                        ctx.at(-1, "rerun produced a different event trace"));
        }
    } // namespace

    bool VerifyReport::all_passed() const
    {
        return std::all_of(properties.begin(), properties.end(), [](const PropertyResult &p) { return p.passed(); });
    }

    std::string VerifyReport::to_json() const
    {
        nlohmann::ordered_json doc;
        doc["runs"] = runs;
        doc["all_passed"] = all_passed();
        doc["event_counts"] = nlohmann::ordered_json::object();
        for (const auto &[name, count] : event_counts)
            doc["event_counts"][name] = count;
        doc["properties"] = nlohmann::ordered_json::array();
        for (const PropertyResult &p : properties)
        {
            nlohmann::ordered_json row;
            row["name"] = p.name;
            row["passed"] = p.passed();
            row["checks"] = p.checks;
            row["failures"] = p.failures;
            if (p.first_failure)
            {
                const Counterexample &c = *p.first_failure;
                row["counterexample"] = {{"seed", c.seed}, {"n", c.n}, {"l", c.l},
                                         {"event_index", c.event_index}, {"detail", c.detail}};
            }
            doc["properties"].push_back(row);
        }
        return doc.dump(2);
    }

    VerifyReport run_verification(const VerifyOptions &options)
    {
        std::vector<Cell> cells;
        for (int n : options.n_values)
        {
            for (double l : options.l_values)
                cells.push_back(Cell{n, l});
        }
        if (cells.empty())
            throw std::invalid_argument("verification grid is empty");

        Suite suite;
        std::mt19937_64 fuzz(options.fuzz_seed);
        for (const Cell &cell : cells)
            check_prc_laws(suite, options, cell, fuzz);

        VerifyReport report;
        for (const char *name : {"Case1", "Case2", "Case3", "Case4", "Silent", "Collision"})
            report.event_counts[name] = 0;

        for (int i = 0; i < options.seeds; ++i)
            distinct_run(suite, options, cells[static_cast<std::size_t>(i) % cells.size()], static_cast<std::uint64_t>(i),
                         report.event_counts);
        for (int i = 0; i < options.identical_phase_runs; ++i)
            identical_run(suite, options, cells[static_cast<std::size_t>(i) % cells.size()],
                          static_cast<std::uint64_t>(i));

        if (options.seeds > 0)
        {
            const auto &c = report.event_counts;
            const bool covered = c.at("Case1") > 0 && c.at("Case2") > 0 && c.at("Case3") > 0 && c.at("Silent") > 0;
            suite.check(kCoverage, covered, [&] {
                return Counterexample{0, 0, 0.0, -1,
                                      fmt::format("Case1={} Case2={} Case3={} Silent={}", c.at("Case1"),
                                                  c.at("Case2"), c.at("Case3"), c.at("Silent"))};
            });
        }

        report.properties = suite.take();
        report.runs = options.seeds + options.identical_phase_runs;
        return report;
    }

} // namespace desync

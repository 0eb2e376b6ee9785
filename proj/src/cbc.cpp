#include "hoqmc/cbc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hoqmc/util.hpp"
#include "hoqmc/walsh.hpp"

namespace hoqmc {

namespace {

// One criterion DP layer: R[l] += omega * sum_nu coef[nu] ffall[l][nu] R[l-nu],
// l descending so the right-hand side reads previous-layer values.
// R carries l! * Q_l, which keeps every entry within double range.
inline void fold_dimension(double* r, int lcur, double omega, const double* coef,
                           int alpha, const std::vector<std::vector<double>>& ffall) {
    for (int l = lcur; l >= 1; --l) {
        double acc = 0.0;
        int top = std::min(l, alpha);
        for (int nu = 1; nu <= top; ++nu)
            acc += coef[nu] * ffall[l][nu] * r[l - nu];
        r[l] += omega * acc;
    }
}

inline double level_sum(const double* r, int lmax) {
    double s = 0.0;
    for (int l = 1; l <= lmax; ++l) s += r[l];
    return s;
}

// coef[nu] = 2^{[nu==alpha]} beta^nu for nu = 1..alpha.
inline void make_coef(double beta, int alpha, double* coef) {
    double bp = 1.0;
    for (int nu = 1; nu <= alpha; ++nu) {
        bp *= beta;
        coef[nu] = (nu == alpha ? 2.0 : 1.0) * bp;
    }
}

// Kernel evaluation on a full interlaced numerator; the digit loop and
// kernel_step sequence must stay in lockstep with the batched evaluator.
inline double kernel_numerator(std::uint64_t z, int alpha, int nd, std::uint32_t b,
                               const double* bneg, double* v) {
    for (int c = 0; c <= alpha; ++c) v[c] = 0.0;
    v[0] = 1.0;
    for (int a = nd; a >= 1; --a) {
        std::uint64_t xi = z % b;
        z /= b;
        double ga = xi == 0 ? double(b - 1) : -1.0;
        detail::kernel_step(v, alpha, ga * bneg[a], ga);
    }
    return detail::kernel_finish(v, alpha);
}

struct StepLayout {
    // Digit positions a = nd..1 split around the candidate digits of one
    // interlace slot. seg_before[l] holds the fixed positions processed
    // immediately before candidate digit l (l = m..1); seg_before[0] is the
    // tail below the last candidate position.
    std::vector<std::vector<int>> seg_before;
    std::vector<std::uint64_t> digit_weight;  // candidate digit l -> b^{m-l}
};

StepLayout make_layout(int alpha, int m, std::uint32_t b, int slot) {
    StepLayout lay;
    lay.seg_before.assign(m + 1, {});
    lay.digit_weight.assign(m + 1, 0);
    int nd = alpha * m;
    auto cand_pos = [&](int l) { return alpha * (l - 1) + slot; };
    int l = m;
    for (int a = nd; a >= 1; --a) {
        if (l >= 1 && a == cand_pos(l)) {
            lay.digit_weight[l] = ipow_u64(b, m - l);
            --l;
        } else {
            lay.seg_before[l].push_back(a);
        }
    }
    return lay;
}

// Evaluates omega(fixed + spread_slot(d)) for every digit block d in one
// pass, sharing the DP state across common digit prefixes. The tail below
// the last candidate position together with the final state sum is folded
// into one linear functional phi, so each leaf costs a single dot product.
class BatchKernel {
public:
    BatchKernel(const StepLayout& lay, int alpha, int m, std::uint32_t b, int slot,
                const double* bneg)
        : lay_(lay), alpha_(alpha), m_(m), b_(b), slot_(slot), bneg_(bneg),
          fixed_digit_(alpha * m + 1, 0), phi_(alpha + 1),
          stack_((m + 1) * (alpha + 1)) {}

    void set_point(std::uint64_t fixed_z) {
        int nd = alpha_ * m_;
        for (int a = nd; a >= 1; --a) {
            fixed_digit_[a] = static_cast<std::uint32_t>(fixed_z % b_);
            fixed_z /= b_;
        }
        // phi = (tail transitions)^T applied to the all-ones functional,
        // in reverse position order.
        for (int c = 0; c <= alpha_; ++c) phi_[c] = 1.0;
        const auto& tail = lay_.seg_before[0];
        for (auto it = tail.rbegin(); it != tail.rend(); ++it) {
            int a = *it;
            double ga = fixed_digit_[a] == 0 ? double(b_ - 1) : -1.0;
            double fa = ga * bneg_[a];
            for (int c = 0; c < alpha_ - 1; ++c) phi_[c] += fa * phi_[c + 1];
            phi_[alpha_ - 1] += fa * phi_[alpha_];
            phi_[alpha_] *= 1.0 + ga;
        }
    }

    // All digit blocks at once (vec[d] for d in [0, b^m)).
    void run_all(std::vector<double>& vec) {
        double* v = stack_.data() + m_ * (alpha_ + 1);
        for (int c = 0; c <= alpha_; ++c) v[c] = 0.0;
        v[0] = 1.0;
        descend(m_, v, 0, vec);
    }

    // Single digit block, same arithmetic as the corresponding run_all leaf.
    double run_one(std::uint64_t d) {
        double* v = stack_.data();
        for (int c = 0; c <= alpha_; ++c) v[c] = 0.0;
        v[0] = 1.0;
        apply_fixed(lay_.seg_before[m_], v);
        for (int l = m_; l >= 1; --l) {
            std::uint64_t u = (d / lay_.digit_weight[l]) % b_;
            apply_candidate(l, static_cast<std::uint32_t>(u), v);
            if (l > 1) apply_fixed(lay_.seg_before[l - 1], v);
        }
        return finish(v);
    }

private:
    void apply_fixed(const std::vector<int>& seg, double* v) const {
        for (int a : seg) {
            double ga = fixed_digit_[a] == 0 ? double(b_ - 1) : -1.0;
            detail::kernel_step(v, alpha_, ga * bneg_[a], ga);
        }
    }

    void apply_candidate(int l, std::uint32_t u, double* v) const {
        int pos = alpha_ * (l - 1) + slot_;
        double ga = u == 0 ? double(b_ - 1) : -1.0;
        detail::kernel_step(v, alpha_, ga * bneg_[pos], ga);
    }

    double finish(const double* v) const {
        double s = 0.0;
        for (int c = 0; c <= alpha_; ++c) s += phi_[c] * v[c];
        return s - 1.0;
    }

    void descend(int l, double* v, std::uint64_t d, std::vector<double>& vec) {
        if (l == 0) {
            vec[d] = finish(v);
            return;
        }
        apply_fixed(lay_.seg_before[l], v);
        if (l == 1 && b_ == 2) {
            // Leaf sibling pair in closed form: with p = 2^{-pos} the two
            // candidate digits give dot(phi, child) = base +- (e + p u).
            double p = bneg_[slot_];  // position of candidate digit 1
            double base = 0.0, u = 0.0;
            for (int c = 0; c <= alpha_; ++c) base += phi_[c] * v[c];
            for (int c = 1; c <= alpha_; ++c) u += phi_[c] * v[c - 1];
            double delta = phi_[alpha_] * v[alpha_] + p * u;
            vec[d] = (base + delta) - 1.0;
            vec[d + lay_.digit_weight[1]] = (base - delta) - 1.0;
            return;
        }
        double* child = stack_.data() + (l - 1) * (alpha_ + 1);
        for (std::uint32_t u = 0; u < b_; ++u) {
            for (int c = 0; c <= alpha_; ++c) child[c] = v[c];
            apply_candidate(l, u, child);
            descend(l - 1, child, d + u * lay_.digit_weight[l], vec);
        }
    }

    const StepLayout& lay_;
    int alpha_;
    int m_;
    std::uint32_t b_;
    int slot_;
    const double* bneg_;
    std::vector<std::uint32_t> fixed_digit_;
    std::vector<double> phi_;
    std::vector<double> stack_;
};

}  // namespace

double cbc_criterion(const std::vector<std::vector<std::uint64_t>>& columns,
                     int alpha, int m, std::uint32_t b,
                     const SPODWeightSpec& weights) {
    weights.validate();
    if (alpha != weights.alpha)
        throw std::invalid_argument("cbc_criterion: alpha mismatch with weights");
    int j = static_cast<int>(columns.size());
    if (j == 0) return 0.0;
    if (weights.beta.size() < static_cast<std::size_t>(j))
        throw std::invalid_argument("cbc_criterion: beta prefix shorter than columns");
    std::uint64_t n_points = columns[0].size();
    for (const auto& col : columns)
        if (col.size() != n_points)
            throw std::invalid_argument("cbc_criterion: ragged columns");
    if (n_points == 0) throw std::invalid_argument("cbc_criterion: empty point set");

    int nd = alpha * m;
    std::uint64_t denom = ipow_u64(b, nd);
    int lmax = alpha * j;
    auto ffall = detail::falling_factorial_table(lmax, alpha);
    std::vector<double> bneg(nd + 1);
    bneg[0] = 1.0;
    for (int a = 1; a <= nd; ++a) bneg[a] = bneg[a - 1] / b;
    std::vector<double> coef((alpha + 1) * j, 0.0);
    for (int r = 0; r < j; ++r) make_coef(weights.beta[r], alpha, &coef[r * (alpha + 1)]);

    std::vector<double> r_state(lmax + 1), v(alpha + 1);
    double total = blocked_sum(n_points, [&](std::size_t n) {
        for (int l = 0; l <= lmax; ++l) r_state[l] = 0.0;
        r_state[0] = 1.0;
        for (int r = 1; r <= j; ++r) {
            std::uint64_t z = columns[r - 1][n];
            if (z >= denom)
                throw std::invalid_argument("cbc_criterion: coordinate out of range");
            double omega = kernel_numerator(z, alpha, nd, b, bneg.data(), v.data());
            fold_dimension(r_state.data(), alpha * r, omega,
                           &coef[(r - 1) * (alpha + 1)], alpha, ffall);
        }
        return level_sum(r_state.data(), lmax);
    });
    return total / static_cast<double>(n_points);
}

InterlacedRuleSpec cbc_construct(std::uint32_t b, int m, int alpha, int s,
                                 const SPODWeightSpec& weights,
                                 const CbcOptions& opts) {
    weights.validate();
    if (alpha != weights.alpha)
        throw std::invalid_argument("cbc_construct: alpha mismatch with weights");
    if (m < 1 || s < 1) throw std::invalid_argument("cbc_construct: need m,s >= 1");
    if (weights.beta.size() < static_cast<std::size_t>(s))
        throw std::invalid_argument("cbc_construct: beta prefix shorter than s");

    InterlacedRuleSpec spec;
    spec.b = b;
    spec.m = m;
    spec.alpha = alpha;
    spec.s = s;
    spec.modulus = first_irreducible(b, m);
    if (ipow_u64(b, static_cast<unsigned>(alpha) * m) > (1ull << 62))
        throw std::invalid_argument("cbc_construct: b^(alpha*m) exceeds 62-bit budget");

    detail::LatticeTables tables = detail::build_tables(spec.modulus);
    const std::uint64_t n_points = tables.n_points;
    const std::uint64_t order = n_points - 1;
    const int nd = alpha * m;
    const int lmax = alpha * s;
    const auto ffall = detail::falling_factorial_table(lmax, alpha);

    std::vector<double> bneg(nd + 1);
    bneg[0] = 1.0;
    for (int a = 1; a <= nd; ++a) bneg[a] = bneg[a - 1] / b;

    // spread tables per slot
    std::vector<std::vector<std::uint64_t>> spread(alpha);
    for (int i = 1; i <= alpha; ++i) {
        spread[i - 1].resize(n_points);
        for (std::uint64_t d = 0; d < n_points; ++d)
            spread[i - 1][d] = detail::spread_slot(d, alpha, b, m, i);
    }

    // Per-point criterion state over completed dimensions, and the partial
    // interlaced numerator of the dimension under construction.
    std::vector<double> r_state(n_points * (lmax + 1), 0.0);
    for (std::uint64_t n = 0; n < n_points; ++n) r_state[n * (lmax + 1)] = 1.0;
    std::vector<std::uint64_t> fixed_z(n_points, 0);
    std::vector<double> w_point(n_points, 0.0);

    const std::size_t nblocks = block_count(n_points);
    bool batched = opts.score_mode == 2 ||
                   (opts.score_mode == 0 && order * n_points >= (1ull << 16));

    std::vector<double> score_enc(n_points, 0.0);
    std::vector<double> block_partial;
    std::vector<double> block_comp;
    if (batched) {
        block_partial.assign(nblocks * order, 0.0);
        block_comp.assign(nblocks * order, 0.0);
    }

    std::vector<double> coef(alpha + 1, 0.0);
    spec.gen.reserve(static_cast<std::size_t>(alpha) * s);

    for (int j = 1; j <= s; ++j) {
        int lprev = alpha * (j - 1);
        make_coef(weights.beta[j - 1], alpha, coef.data());

        // W_n = sum_nu coef[nu] sum_l ffall[l+nu][nu] R[l]: the linear
        // functional such that E(q) = E_prev + (1/N) sum_n omega_n(q) W_n.
        parallel_for(nblocks, opts.threads, [&](std::size_t bi) {
            std::uint64_t b0 = bi * kSumBlock;
            std::uint64_t b1 = std::min<std::uint64_t>(n_points, b0 + kSumBlock);
            for (std::uint64_t n = b0; n < b1; ++n) {
                const double* r = &r_state[n * (lmax + 1)];
                double w = 0.0;
                for (int nu = 1; nu <= alpha; ++nu) {
                    double acc = 0.0;
                    for (int l = 0; l <= lprev; ++l) acc += ffall[l + nu][nu] * r[l];
                    w += coef[nu] * acc;
                }
                w_point[n] = w;
            }
        });

        for (int slot = 1; slot <= alpha; ++slot) {
            std::uint64_t chosen;
            if (j == 1 && slot == 1) {
                chosen = 1;  // CBC convention
            } else {
                StepLayout lay = make_layout(alpha, m, b, slot);
                if (batched) {
                    // Slot 1 sees no chosen digits yet, so the kernel table
                    // is the same for every point: build it once.
                    std::vector<double> shared_vec;
                    if (slot == 1) {
                        BatchKernel bk(lay, alpha, m, b, slot, bneg.data());
                        bk.set_point(0);
                        shared_vec.resize(n_points);
                        bk.run_all(shared_vec);
                    }
                    parallel_for(nblocks, opts.threads, [&](std::size_t bi) {
                        std::uint64_t b0 = bi * kSumBlock;
                        std::uint64_t b1 =
                            std::min<std::uint64_t>(n_points, b0 + kSumBlock);
                        double* part = &block_partial[bi * order];
                        double* comp = &block_comp[bi * order];
                        for (std::uint64_t q = 0; q < order; ++q) part[q] = comp[q] = 0.0;
                        BatchKernel bk(lay, alpha, m, b, slot, bneg.data());
                        std::vector<double> own_vec(slot == 1 ? 0 : n_points);
                        auto kadd = [](double& sum, double& c, double x) {
                            double y = x - c;
                            double t = sum + y;
                            c = (t - sum) - y;
                            sum = t;
                        };
                        for (std::uint64_t n = b0; n < b1; ++n) {
                            const double* vec;
                            if (slot == 1) {
                                vec = shared_vec.data();
                            } else {
                                bk.set_point(fixed_z[n]);
                                bk.run_all(own_vec);
                                vec = own_vec.data();
                            }
                            double wn = w_point[n];
                            if (n == 0) {
                                double val = vec[0] * wn;
                                for (std::uint64_t a = 0; a < order; ++a)
                                    kadd(part[a], comp[a], val);
                                continue;
                            }
                            std::uint64_t o = tables.log_of[n];
                            const std::uint64_t* de = tables.dig_exp.data();
                            std::uint64_t head = order - o;
                            for (std::uint64_t a = 0; a < head; ++a)
                                kadd(part[a], comp[a], vec[de[o + a]] * wn);
                            for (std::uint64_t a = head; a < order; ++a)
                                kadd(part[a], comp[a], vec[de[a - head]] * wn);
                        }
                    });
                    for (std::uint64_t a = 0; a < order; ++a) {
                        Kahan k;
                        for (std::size_t bi = 0; bi < nblocks; ++bi)
                            k.add(block_partial[bi * order + a]);
                        score_enc[tables.exp_of[a]] = k.value();
                    }
                } else {
                    parallel_for(order, opts.threads, [&](std::size_t qi) {
                        std::uint64_t q_enc = qi + 1;
                        BatchKernel bk(lay, alpha, m, b, slot, bneg.data());
                        Kahan total;
                        for (std::uint64_t b0 = 0; b0 < n_points; b0 += kSumBlock) {
                            std::uint64_t b1 =
                                std::min<std::uint64_t>(n_points, b0 + kSumBlock);
                            Kahan blk;
                            for (std::uint64_t n = b0; n < b1; ++n) {
                                bk.set_point(fixed_z[n]);
                                double omega = bk.run_one(tables.coord(n, q_enc));
                                blk.add(omega * w_point[n]);
                            }
                            total.add(blk.value());
                        }
                        score_enc[q_enc] = total.value();
                    });
                }
                double best = std::numeric_limits<double>::infinity();
                chosen = 1;
                for (std::uint64_t q = 1; q < n_points; ++q)
                    if (score_enc[q] < best) {
                        best = score_enc[q];
                        chosen = q;
                    }
            }
            spec.gen.push_back(PolyFb::from_int(b, chosen));
            const auto& spr = spread[slot - 1];
            parallel_for(nblocks, opts.threads, [&](std::size_t bi) {
                std::uint64_t b0 = bi * kSumBlock;
                std::uint64_t b1 = std::min<std::uint64_t>(n_points, b0 + kSumBlock);
                for (std::uint64_t n = b0; n < b1; ++n)
                    fixed_z[n] += spr[tables.coord(n, chosen)];
            });
        }

        // Dimension complete: fold its kernel values into the running state.
        parallel_for(nblocks, opts.threads, [&](std::size_t bi) {
            std::uint64_t b0 = bi * kSumBlock;
            std::uint64_t b1 = std::min<std::uint64_t>(n_points, b0 + kSumBlock);
            std::vector<double> v(alpha + 1);
            for (std::uint64_t n = b0; n < b1; ++n) {
                double omega =
                    kernel_numerator(fixed_z[n], alpha, nd, b, bneg.data(), v.data());
                fold_dimension(&r_state[n * (lmax + 1)], alpha * j, omega, coef.data(),
                               alpha, ffall);
                fixed_z[n] = 0;
            }
        });
    }
    return spec;
}

}  // namespace hoqmc

//! Algebraic identities behind the Harnack computation, checked on random
//! tensors with the right symmetries. All components are orthonormal.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{HarnackInput, HarnackTriple};
use crate::chart::two_form_pairs;
use crate::error::{GeomError, Result};
use crate::flow::PTermPlacement;
use crate::tensor::Tensor;

fn random_symmetric(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    (&a + a.transpose()) * 0.5
}

/// Kulkarni–Nomizu product `(S ∧ T)_ijkl = S_ik T_jl + S_jl T_ik − S_il T_jk − S_jk T_il`.
pub fn kulkarni_nomizu(s: &DMatrix<f64>, t: &DMatrix<f64>) -> Tensor {
    Tensor::from_fn(s.nrows(), 4, |x| {
        let (i, j, k, l) = (x[0], x[1], x[2], x[3]);
        s[(i, k)] * t[(j, l)] + s[(j, l)] * t[(i, k)] - s[(i, l)] * t[(j, k)] - s[(j, k)] * t[(i, l)]
    })
}

/// Algebraic curvature tensor: a sum of Kulkarni–Nomizu products, so all
/// Riemann symmetries including the first Bianchi identity hold.
pub fn random_riemann(n: usize, rng: &mut impl Rng) -> Tensor {
    let mut r = Tensor::zeros(n, 4);
    for _ in 0..3 {
        r = r.add(&kulkarni_nomizu(&random_symmetric(n, rng), &random_symmetric(n, rng)));
    }
    r
}

/// `P_ijk = B_ijk − B_jik` with `B` symmetric in its last two slots, which
/// forces the cyclic identity.
pub fn random_p(n: usize, rng: &mut impl Rng) -> Tensor {
    let mut b = Tensor::zeros(n, 3);
    for i in 0..n {
        for j in 0..n {
            for k in j..n {
                let v = rng.random_range(-1.0..1.0);
                b.set(&[i, j, k], v);
                b.set(&[i, k, j], v);
            }
        }
    }
    Tensor::from_fn(n, 3, |x| b.at(&[x[0], x[1], x[2]]) - b.at(&[x[1], x[0], x[2]]))
}

fn random_two_form(n: usize, rng: &mut impl Rng) -> Tensor {
    let mut u = Tensor::zeros(n, 2);
    for i in 0..n {
        for j in i + 1..n {
            let v = rng.random_range(-1.0..1.0);
            u.set(&[i, j], v);
            u.set(&[j, i], -v);
        }
    }
    u
}

/// `B_ijkl = Σ R_imjn R_kmln`.
fn b_ortho(r: &Tensor) -> Tensor {
    let n = r.dim();
    Tensor::from_fn(n, 4, |x| {
        let mut s = 0.0;
        for m in 0..n {
            for q in 0..n {
                s += r.at(&[x[0], m, x[1], q]) * r.at(&[x[2], m, x[3], q]);
            }
        }
        s
    })
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AlgebraicReport {
    pub dim: usize,
    pub trials: usize,
    /// `2R_imjn R_kmln − 2R_imjn R_lmkn = R_ijmn R_klmn`.
    pub rm_rearrangement: f64,
    /// `2P_imn P_jmn − 2P_imn P_jnm = P_mni P_mnj`.
    pub p_rearrangement: f64,
    /// Curvature line of the heat identity contracted with `U^ij U^kl`.
    pub rm_line: f64,
    /// `U^ij U^0k` line with the direct placement `R_jmkn P_imn`.
    pub p_line_direct: f64,
    /// Same with the swapped placement `R_imkn P_jmn`.
    pub p_line_swapped: f64,
    /// `U^0i U^0j` line.
    pub m_line: f64,
    pub p_cyclic: f64,
    pub rm_first_bianchi: f64,
    /// Sum-of-squares identity on random factorizations.
    pub sum_of_squares: f64,
}

impl AlgebraicReport {
    /// Largest residual among identities expected to hold.
    pub fn max(&self) -> f64 {
        [
            self.rm_rearrangement,
            self.p_rearrangement,
            self.rm_line,
            self.p_line_direct,
            self.m_line,
            self.p_cyclic,
            self.rm_first_bianchi,
            self.sum_of_squares,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn algebraic_identities(dim: usize, trials: usize, seed: u64) -> AlgebraicReport {
    let n = dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = AlgebraicReport { dim, trials, ..Default::default() };
    let upd = |slot: &mut f64, v: f64| *slot = slot.max(v.abs());
    for _ in 0..trials {
        let r = random_riemann(n, &mut rng);
        let p = random_p(n, &mut rng);
        let u = random_two_form(n, &mut rng);
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b = b_ortho(&r);
        let rm2 = Tensor::from_fn(n, 4, |x| {
            let mut s = 0.0;
            for m in 0..n {
                for q in 0..n {
                    s += r.at(&[x[0], x[1], m, q]) * r.at(&[x[2], x[3], m, q]);
                }
            }
            s
        });
        let pp = |i: usize, j: usize, swap: bool| -> f64 {
            let mut s = 0.0;
            for m in 0..n {
                for q in 0..n {
                    s += p.at(&[i, m, q]) * if swap { p.at(&[j, q, m]) } else { p.at(&[j, m, q]) };
                }
            }
            s
        };
        let (mut rm_lhs, mut rm_rhs) = (0.0, 0.0);
        let (mut pl, mut pl_direct, mut pl_swap) = (0.0, 0.0, 0.0);
        let (mut ml, mut mr) = (0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                let mut pmn = 0.0;
                for m in 0..n {
                    for q in 0..n {
                        pmn += p.at(&[m, q, i]) * p.at(&[m, q, j]);
                    }
                }
                upd(&mut rep.p_rearrangement, 2.0 * pp(i, j, false) - 2.0 * pp(i, j, true) - pmn);
                ml += (2.0 * pp(i, j, false) - 4.0 * pp(i, j, true)) * w[i] * w[j];
                mr += (pmn - 2.0 * pp(i, j, true)) * w[i] * w[j];
                for k in 0..n {
                    upd(&mut rep.p_cyclic, p.at(&[i, j, k]) + p.at(&[j, k, i]) + p.at(&[k, i, j]));
                    let (mut a, mut bb, mut direct, mut swapped) = (0.0, 0.0, 0.0, 0.0);
                    for m in 0..n {
                        for q in 0..n {
                            a += r.at(&[i, m, j, q]) * p.at(&[m, q, k]);
                            bb += r.at(&[i, m, k, q]) * p.at(&[m, j, q]);
                            direct += r.at(&[j, m, k, q]) * p.at(&[i, m, q]);
                            swapped += r.at(&[i, m, k, q]) * p.at(&[j, m, q]);
                        }
                    }
                    let uw = u.at(&[i, j]) * w[k];
                    pl += (2.0 * a + 4.0 * bb) * uw;
                    pl_direct += (2.0 * a + 2.0 * bb + 2.0 * direct) * uw;
                    pl_swap += (2.0 * a + 2.0 * bb + 2.0 * swapped) * uw;
                    for l in 0..n {
                        upd(
                            &mut rep.rm_rearrangement,
                            2.0 * b.at(&[i, j, k, l]) - 2.0 * b.at(&[i, j, l, k]) - rm2.at(&[i, j, k, l]),
                        );
                        upd(
                            &mut rep.rm_first_bianchi,
                            r.at(&[i, j, k, l]) + r.at(&[i, k, l, j]) + r.at(&[i, l, j, k]),
                        );
                        let uu = u.at(&[i, j]) * u.at(&[k, l]);
                        rm_lhs += 2.0
                            * (b.at(&[i, j, k, l]) - b.at(&[i, j, l, k]) + b.at(&[i, k, j, l]) - b.at(&[i, l, j, k]))
                            * uu;
                        rm_rhs += (rm2.at(&[i, j, k, l]) + 4.0 * b.at(&[i, k, j, l])) * uu;
                    }
                }
            }
        }
        upd(&mut rep.rm_line, rm_lhs - rm_rhs);
        upd(&mut rep.p_line_direct, pl_direct - pl);
        upd(&mut rep.p_line_swapped, pl_swap - pl);
        upd(&mut rep.m_line, ml - mr);

        let factors: Vec<Tensor> = (0..3).map(|_| random_two_form(n + 1, &mut rng)).collect();
        let input = HarnackInput { u: random_two_form(n, &mut rng), x: w.clone() };
        upd(&mut rep.sum_of_squares, sum_of_squares_check(&factors, &input).residual);
    }
    rep
}

/// Placement test on its own, for reporting.
pub fn placement_residual(dim: usize, trials: usize, seed: u64, placement: PTermPlacement) -> f64 {
    let r = algebraic_identities(dim, trials, seed);
    match placement {
        PTermPlacement::Direct => r.p_line_direct,
        PTermPlacement::Swapped => r.p_line_swapped,
    }
}

/// Space-time curvature `R̄` on `n + 1` indices with index 0 for time:
/// `R̄_ijkl = R_ijkl`, `R̄_ij0k = P_ijk`, `R̄_0i0j = M_ij`. Orthonormal input.
pub fn spacetime_curvature(triple: &HarnackTriple) -> Tensor {
    let n = triple.dim();
    // normalized pair (lo, hi) and its sign
    let pair = |a: usize, b: usize| if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    Tensor::from_fn(n + 1, 4, |x| {
        if x[0] == x[1] || x[2] == x[3] {
            return 0.0;
        }
        let (a, b, s1) = pair(x[0], x[1]);
        let (c, d, s2) = pair(x[2], x[3]);
        let v = match (a == 0, c == 0) {
            (false, false) => triple.riemann.at(&[a - 1, b - 1, c - 1, d - 1]),
            (false, true) => triple.p.at(&[a - 1, b - 1, d - 1]),
            (true, false) => triple.p.at(&[c - 1, d - 1, b - 1]),
            (true, true) => triple.m.at(&[b - 1, d - 1]),
        };
        s1 * s2 * v
    })
}

/// Factors `X^M` with `R̄_abcd = Σ_M X^M_ab X^M_cd`, from the eigen-decomposition
/// of `R̄` as an operator on 2-forms. Negative eigenvalues violate the
/// precondition.
pub fn factorize(rbar: &Tensor) -> Result<Vec<Tensor>> {
    let n = rbar.dim();
    let pairs = two_form_pairs(n);
    let op = DMatrix::from_fn(pairs.len(), pairs.len(), |p, q| {
        let ((a, b), (c, d)) = (pairs[p], pairs[q]);
        rbar.at(&[a, b, c, d])
    });
    let eig = SymmetricEigen::new(op);
    let scale = eig.eigenvalues.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut out = Vec::new();
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam < -1e-10 * scale {
            return Err(GeomError::Precondition(format!("curvature operator has eigenvalue {lam:e} < 0")));
        }
        if lam <= 0.0 {
            continue;
        }
        let mut x = Tensor::zeros(n, 2);
        for (q, &(a, b)) in pairs.iter().enumerate() {
            let v = lam.sqrt() * eig.eigenvectors[(q, k)];
            x.set(&[a, b], v);
            x.set(&[b, a], -v);
        }
        out.push(x);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct SumOfSquares {
    pub sum_of_squares: f64,
    pub combination: f64,
    pub residual: f64,
}

/// The quartic combination of `R, P, M` equals a sum of squares of linear
/// forms in the factors. The input maps to `Ū^ij = U^ij`, `Ū^0k = X^k / 2`,
/// so that `R̄(Ū, Ū) = Z(U, X)`.
pub fn sum_of_squares_check(factors: &[Tensor], input: &HarnackInput) -> SumOfSquares {
    let n = input.x.len();
    let u = &input.u;
    let w: Vec<f64> = input.x.iter().map(|x| x / 2.0).collect();
    let mut sos = 0.0;
    for xm in factors {
        for xn in factors {
            let mut lin = 0.0;
            for i in 0..n {
                for k in 0..n {
                    lin += xm.at(&[i + 1, k + 1]) * xn.at(&[0, k + 1]) * w[i];
                    lin -= xn.at(&[i + 1, k + 1]) * xm.at(&[0, k + 1]) * w[i];
                    for j in 0..n {
                        lin -= 2.0 * xm.at(&[i + 1, k + 1]) * xn.at(&[j + 1, k + 1]) * u.at(&[i, j]);
                    }
                }
            }
            sos += lin * lin;
        }
    }
    // R, P, M assembled from the same factors
    let rbar = Tensor::from_fn(n + 1, 4, |x| factors.iter().map(|f| f.at(&[x[0], x[1]]) * f.at(&[x[2], x[3]])).sum());
    let r = Tensor::from_fn(n, 4, |x| rbar.at(&[x[0] + 1, x[1] + 1, x[2] + 1, x[3] + 1]));
    let p = Tensor::from_fn(n, 3, |x| rbar.at(&[x[0] + 1, x[1] + 1, 0, x[2] + 1]));
    let m = Tensor::from_fn(n, 2, |x| rbar.at(&[0, x[0] + 1, 0, x[1] + 1]));
    let mut comb = 0.0;
    for i in 0..n {
        for j in 0..n {
            for a in 0..n {
                for b in 0..n {
                    comb += 2.0 * r.at(&[i, a, j, b]) * m.at(&[a, b]) * w[i] * w[j];
                    comb -= 2.0 * p.at(&[i, a, b]) * p.at(&[j, b, a]) * w[i] * w[j];
                }
            }
            for k in 0..n {
                for l in 0..n {
                    for a in 0..n {
                        for b in 0..n {
                            comb += 4.0 * r.at(&[i, a, k, b]) * r.at(&[j, a, l, b]) * u.at(&[i, j]) * u.at(&[k, l]);
                        }
                    }
                }
                for a in 0..n {
                    for b in 0..n {
                        comb += 8.0 * r.at(&[i, a, k, b]) * p.at(&[a, j, b]) * u.at(&[i, j]) * w[k];
                    }
                }
            }
        }
    }
    SumOfSquares { sum_of_squares: sos, combination: comb, residual: (sos - comb).abs() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_hold_on_random_tensors() {
        for dim in 2..=4 {
            let rep = algebraic_identities(dim, 20, 11);
            assert!(rep.max() < 1e-10, "{rep:?}");
        }
    }

    #[test]
    fn swapped_placement_fails_from_dimension_three() {
        assert!(algebraic_identities(2, 10, 3).p_line_swapped < 1e-10);
        assert!(algebraic_identities(3, 10, 3).p_line_swapped > 1e-3);
    }

    #[test]
    fn factorization_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f: Vec<Tensor> = (0..4).map(|_| random_two_form(4, &mut rng)).collect();
        let rbar = Tensor::from_fn(4, 4, |x| f.iter().map(|t| t.at(&[x[0], x[1]]) * t.at(&[x[2], x[3]])).sum());
        let g = factorize(&rbar).unwrap();
        let back = Tensor::from_fn(4, 4, |x| g.iter().map(|t| t.at(&[x[0], x[1]]) * t.at(&[x[2], x[3]])).sum());
        assert!(back.max_abs_diff(&rbar) < 1e-12);
        assert!(matches!(factorize(&rbar.scaled(-1.0)), Err(GeomError::Precondition(_))));
    }
}

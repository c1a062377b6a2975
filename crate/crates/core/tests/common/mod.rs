//! Shared helpers for the integration suites: an eigenvalue oracle that is
//! independent of the Jacobi implementation, plus seeded random generators
//! for matrices, unitaries and states.
#![allow(dead_code)]

use quasifree::linalg::{ComplexMatrix, HermitianMatrix, C64};
use quasifree::scenarios::scenario_rng;
use quasifree::states::SingleModeState;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    scenario_rng(seed)
}

/// Characteristic polynomial coefficients of a 4×4 Hermitian matrix via the
/// Faddeev–LeVerrier recursion: `p(x) = x^4 + c[0]x^3 + c[1]x^2 + c[2]x + c[3]`.
fn char_poly_coeffs(m: &HermitianMatrix) -> [f64; 4] {
    let a = m.to_complex();
    let n = 4;
    let id = ComplexMatrix::identity(n);
    let mut coeffs = [0.0; 4];
    let mut mk = a.clone();
    for k in 1..=n {
        let tr: C64 = (0..n).map(|i| mk.get(i, i)).sum();
        let ck = -tr.re / k as f64;
        coeffs[k - 1] = ck;
        if k < n {
            mk = a.mul(&mk.add(&id.scale(c(ck, 0.0))));
        }
    }
    coeffs
}

fn eval_poly(coeffs: &[f64; 4], x: f64) -> f64 {
    (((x + coeffs[0]) * x + coeffs[1]) * x + coeffs[2]) * x + coeffs[3]
}

/// Real roots of the derivative `4x^3 + 3c0 x^2 + 2c1 x + c2`, ascending.
/// A Hermitian characteristic polynomial has four real roots, so the
/// derivative always has three (counting multiplicity); the trigonometric
/// form of the cubic solution delivers them directly.
fn derivative_roots(coeffs: &[f64; 4]) -> [f64; 3] {
    let (a, b, cc, d) = (4.0, 3.0 * coeffs[0], 2.0 * coeffs[1], coeffs[2]);
    let shift = b / (3.0 * a);
    let p = cc / a - 3.0 * shift * shift;
    let q = 2.0 * shift.powi(3) - shift * cc / a + d / a;
    if p >= -1e-30 {
        // Degenerate (near-triple) critical point.
        let t = -q.cbrt();
        return [t - shift; 3];
    }
    let rho = 2.0 * (-p / 3.0).sqrt();
    let arg = (3.0 * q / (p * rho)).clamp(-1.0, 1.0);
    let theta = arg.acos();
    let mut roots = [
        rho * (theta / 3.0).cos() - shift,
        rho * ((theta + 2.0 * std::f64::consts::PI) / 3.0).cos() - shift,
        rho * ((theta + 4.0 * std::f64::consts::PI) / 3.0).cos() - shift,
    ];
    roots.sort_by(f64::total_cmp);
    roots
}

/// Eigenvalues of a 4×4 Hermitian matrix by characteristic-polynomial root
/// finding: the three critical points of `p` interlace the four roots, so
/// bisection inside each of the four sign-change brackets pins them down.
pub fn eigenvalues_char_poly(m: &HermitianMatrix) -> Vec<f64> {
    assert_eq!(m.dim(), 4);
    let coeffs = char_poly_coeffs(m);
    let crit = derivative_roots(&coeffs);
    // Gershgorin bounds, padded.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..4 {
        let radius: f64 = (0..4).filter(|&j| j != i).map(|j| m.get(i, j).norm()).sum();
        lo = lo.min(m.get(i, i).re - radius);
        hi = hi.max(m.get(i, i).re + radius);
    }
    let pad = 1.0 + 1e-6 * (hi - lo).abs();
    let brackets = [
        (lo - pad, crit[0]),
        (crit[0], crit[1]),
        (crit[1], crit[2]),
        (crit[2], hi + pad),
    ];
    let scale = m.frobenius().max(1.0);
    brackets
        .iter()
        .map(|&(a, b)| {
            let (fa, fb) = (eval_poly(&coeffs, a), eval_poly(&coeffs, b));
            // A vanishing endpoint value means the root sits at a critical
            // point (a repeated eigenvalue).
            if fa.abs() < 1e-9 * scale.powi(4) && fa.abs() <= fb.abs() {
                return a;
            }
            if fb.abs() < 1e-9 * scale.powi(4) {
                return b;
            }
            let (mut a, mut b, mut fa) = (a, b, fa);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                let fm = eval_poly(&coeffs, mid);
                if (fm > 0.0) == (fa > 0.0) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
                if b - a <= f64::EPSILON * (a.abs() + b.abs() + 1.0) {
                    break;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

/// Random Hermitian matrix with entries of order `scale`.
pub fn random_hermitian(rng: &mut impl Rng, dim: usize, scale: f64) -> HermitianMatrix {
    let mut entries = vec![c(0.0, 0.0); dim * dim];
    for j in 0..dim {
        for k in j..dim {
            if j == k {
                entries[j * dim + j] = c(scale * (2.0 * rng.gen::<f64>() - 1.0), 0.0);
            } else {
                let z = c(
                    scale * (2.0 * rng.gen::<f64>() - 1.0),
                    scale * (2.0 * rng.gen::<f64>() - 1.0),
                );
                entries[j * dim + k] = z;
                entries[k * dim + j] = z.conj();
            }
        }
    }
    HermitianMatrix::new(dim, entries).unwrap()
}

/// Random PSD matrix `X†X` from a random complex square factor.
pub fn random_psd(rng: &mut impl Rng, dim: usize) -> HermitianMatrix {
    let mut x = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            x.set(i, j, c(2.0 * rng.gen::<f64>() - 1.0, 2.0 * rng.gen::<f64>() - 1.0));
        }
    }
    HermitianMatrix::symmetrized(&x.adjoint().mul(&x))
}

/// Random unitary as a product of complex Givens rotations and phases —
/// independent of any eigensolver.
pub fn random_unitary(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    let mut u = ComplexMatrix::identity(dim);
    for p in 0..dim {
        for q in p + 1..dim {
            let theta = std::f64::consts::PI * rng.gen::<f64>();
            let phi = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
            let (cs, sn) = (theta.cos(), theta.sin());
            let phase = C64::from_polar(1.0, phi);
            let mut g = ComplexMatrix::identity(dim);
            g.set(p, p, c(cs, 0.0));
            g.set(p, q, sn * phase);
            g.set(q, p, -sn * phase.conj());
            g.set(q, q, c(cs, 0.0));
            u = u.mul(&g);
        }
    }
    for i in 0..dim {
        let phase = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * rng.gen::<f64>());
        for k in 0..dim {
            u.set(k, i, u.get(k, i) * phase);
        }
    }
    u
}

/// Random physical single-mode state over the full admissible set.
pub fn random_valid_state(rng: &mut impl Rng) -> SingleModeState {
    quasifree::scenarios::sample_valid_state(rng)
}

/// Random unit two-vector.
pub fn random_psi2(rng: &mut impl Rng) -> Vec<C64> {
    let v = vec![
        c(2.0 * rng.gen::<f64>() - 1.0, 2.0 * rng.gen::<f64>() - 1.0),
        c(2.0 * rng.gen::<f64>() - 1.0, 2.0 * rng.gen::<f64>() - 1.0),
    ];
    quasifree::linalg::vec_normalized(&v)
}

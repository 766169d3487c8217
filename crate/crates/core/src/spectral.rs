//! Momentum-sector spectra of ring walks.
//!
//! The uniform ring commutes with the one-site translation, so each sector
//! `theta_k = 2 pi k / N` reduces to a 2x2 problem with closed-form
//! eigenpairs. Placing a phase shifter on every second edge leaves only the
//! two-site translation as a symmetry; those sectors are 4x4 and are solved
//! numerically, with the characteristic quartic kept as an independent check.

use std::f64::consts::PI;

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{Result, WalkError};
use crate::walk::{StepOperator, WalkState};
use crate::UNITARITY_TOL;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumSector {
    pub k: usize,
    /// Ring size the sector belongs to.
    pub n: usize,
    pub theta: f64,
}

impl MomentumSector {
    pub fn new(k: usize, n: usize) -> Self {
        MomentumSector {
            k,
            n,
            theta: 2.0 * PI * k as f64 / n as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
    /// The two branches coincide; no ordering is implied.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coefficients {
    /// Weights of the right-moving and left-moving plane waves.
    Uniform { plus: Complex64, minus: Complex64 },
    /// Weights of the even/odd-edge plane waves of the two-periodic ring.
    TwoPeriodic {
        a_plus: Complex64,
        b_minus: Complex64,
        a_minus: Complex64,
        b_plus: Complex64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumEntry {
    pub sector: MomentumSector,
    pub branch: Branch,
    pub lambda: Complex64,
    pub coeffs: Coefficients,
}

impl SpectrumEntry {
    /// Eigenvector as amplitudes on the ring built by `Graph::cycle(n)`.
    pub fn amplitudes(&self) -> Vec<Complex64> {
        let n = self.sector.n;
        let theta = self.sector.theta;
        let mut out = vec![Complex64::new(0.0, 0.0); 2 * n];
        match self.coeffs {
            Coefficients::Uniform { plus, minus } => {
                let norm = 1.0 / (n as f64).sqrt();
                for j in 0..n {
                    let wave = Complex64::from_polar(norm, j as f64 * theta);
                    out[2 * j] = plus * wave;
                    out[2 * j + 1] = minus * wave;
                }
            }
            Coefficients::TwoPeriodic {
                a_plus,
                b_minus,
                a_minus,
                b_plus,
            } => {
                let norm = (2.0 / n as f64).sqrt();
                for j in 0..n {
                    let wave = Complex64::from_polar(norm, j as f64 * theta);
                    let (right, left) = if j % 2 == 0 {
                        (a_plus, a_minus)
                    } else {
                        (b_plus, b_minus)
                    };
                    out[2 * j] = right * wave;
                    out[2 * j + 1] = left * wave;
                }
            }
        }
        out
    }

    pub fn state(&self) -> WalkState {
        WalkState::normalized(self.amplitudes()).expect("eigenvector is nonzero")
    }
}

/// Phase of `t` on the branch `(-pi, pi]`.
pub fn transmission_phase(t: Complex64) -> f64 {
    let eta = t.arg();
    if eta <= -PI {
        eta + 2.0 * PI
    } else {
        eta
    }
}

fn check_amplitudes(t: Complex64, r: Complex64) -> Result<()> {
    let norm = t.norm_sqr() + r.norm_sqr();
    if (norm - 1.0).abs() > UNITARITY_TOL {
        return Err(WalkError::NotUnitary(format!(
            "|t|^2 + |r|^2 = {norm} (expected 1)"
        )));
    }
    if r.norm() < 1e-12 {
        return Err(WalkError::InvalidParameter(
            "r = 0 (free propagation); use free_eigensystem".into(),
        ));
    }
    Ok(())
}

/// `C(theta) = sqrt(1 - |t|^2 cos^2(theta - eta))`, `S(theta) = |t| sin(theta - eta)`.
pub fn c_and_s(theta: f64, t: Complex64) -> (f64, f64) {
    let x = theta - transmission_phase(t);
    let tm = t.norm();
    ((1.0 - tm * tm * x.cos().powi(2)).max(0.0).sqrt(), tm * x.sin())
}

/// Closed-form eigenpairs of the uniform beam-splitter ring, two per sector,
/// ordered by `k` and then `+`, `-`.
pub fn cycle_eigensystem(n: usize, t: Complex64, r: Complex64) -> Result<Vec<SpectrumEntry>> {
    if n < 3 {
        return Err(WalkError::CycleTooSmall(n));
    }
    check_amplitudes(t, r)?;
    let tm = t.norm();
    let eta = transmission_phase(t);
    let mut entries = Vec::with_capacity(2 * n);
    for k in 0..n {
        let sector = MomentumSector::new(k, n);
        let (c, s) = c_and_s(sector.theta, t);
        let re = tm * (sector.theta - eta).cos();
        let rc = r.conj();
        let plus_norm = (2.0 * c * (c + s)).sqrt();
        entries.push(SpectrumEntry {
            sector,
            branch: Branch::Plus,
            lambda: Complex64::new(re, c),
            coeffs: Coefficients::Uniform {
                plus: rc / plus_norm,
                minus: Complex64::new(0.0, -(s + c)) / plus_norm,
            },
        });
        let minus_norm = (2.0 * c * (c - s)).sqrt();
        entries.push(SpectrumEntry {
            sector,
            branch: Branch::Minus,
            lambda: Complex64::new(re, -c),
            coeffs: Coefficients::Uniform {
                plus: rc / minus_norm,
                minus: Complex64::new(0.0, c - s) / minus_norm,
            },
        });
    }
    Ok(entries)
}

/// Plane-wave spectrum of the free ring (`|t| = 1`, `r = 0`): right movers
/// with `lambda = t e^{-i theta}` (labelled `Plus`), left movers with
/// `lambda = t* e^{i theta}` (labelled `Minus`).
pub fn free_eigensystem(n: usize, t: Complex64) -> Result<Vec<SpectrumEntry>> {
    if n < 3 {
        return Err(WalkError::CycleTooSmall(n));
    }
    if (t.norm() - 1.0).abs() > UNITARITY_TOL {
        return Err(WalkError::NotUnitary(format!("|t| = {} (expected 1)", t.norm())));
    }
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    Ok((0..n)
        .flat_map(|k| {
            let sector = MomentumSector::new(k, n);
            [
                SpectrumEntry {
                    sector,
                    branch: Branch::Plus,
                    lambda: t * Complex64::from_polar(1.0, -sector.theta),
                    coeffs: Coefficients::Uniform { plus: one, minus: zero },
                },
                SpectrumEntry {
                    sector,
                    branch: Branch::Minus,
                    lambda: t.conj() * Complex64::from_polar(1.0, sector.theta),
                    coeffs: Coefficients::Uniform { plus: zero, minus: one },
                },
            ]
        })
        .collect())
}

/// `||U psi - lambda psi||_2` for the entry's eigenvector.
pub fn eigen_residual(op: &StepOperator, entry: &SpectrumEntry) -> Result<f64> {
    let psi = entry.amplitudes();
    if psi.len() != op.dim() {
        return Err(WalkError::StateLength {
            expected: op.dim(),
            got: psi.len(),
        });
    }
    let u_psi = op.apply_slice(&psi);
    Ok(u_psi
        .iter()
        .zip(&psi)
        .map(|(a, b)| (a - entry.lambda * b).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Sector matrix of the ring with shifter `phi` on every edge `(j, j+1)`,
/// `j` even, in the basis `(a+, b-, a-, b+)`.
pub fn phase_shifted_sector_matrix(theta: f64, t: Complex64, r: Complex64, phi: f64) -> Matrix4<Complex64> {
    let z = Complex64::new(0.0, 0.0);
    let e = |x: f64| Complex64::from_polar(1.0, x);
    let (tc, rc) = (t.conj(), r.conj());
    Matrix4::new(
        z, z, -rc, t * e(-theta),
        z, z, tc * e(theta), r,
        r * e(2.0 * phi), tc * e(theta + phi), z, z,
        t * e(phi - theta), -rc, z, z,
    )
}

/// Coefficient `B` of the quartic `lambda^4 + B lambda^2 + e^{2i phi} = 0`.
fn quartic_middle(theta: f64, t: Complex64, r: Complex64, phi: f64) -> Complex64 {
    let e = |x: f64| Complex64::from_polar(1.0, x);
    r.norm_sqr() * (Complex64::new(1.0, 0.0) + e(2.0 * phi))
        - e(phi) * (t.conj() * t.conj() * e(2.0 * theta) + t * t * e(-2.0 * theta))
}

/// `|lambda^4 + B lambda^2 + e^{2i phi}|`.
pub fn quartic_residual(lambda: Complex64, theta: f64, t: Complex64, r: Complex64, phi: f64) -> f64 {
    let l2 = lambda * lambda;
    (l2 * l2 + quartic_middle(theta, t, r, phi) * l2 + Complex64::from_polar(1.0, 2.0 * phi)).norm()
}

/// The two roots `mu_+`, `mu_-` of the quartic viewed as a quadratic in
/// `lambda^2`, using the principal square root of the discriminant.
pub fn quartic_squared_roots(theta: f64, t: Complex64, r: Complex64, phi: f64) -> (Complex64, Complex64) {
    let b = quartic_middle(theta, t, r, phi);
    let disc = (b * b - 4.0 * Complex64::from_polar(1.0, 2.0 * phi)).sqrt();
    ((-b + disc) / 2.0, (-b - disc) / 2.0)
}

/// Eigenpairs of one two-site-translation sector, solved by dense Schur
/// decomposition of the (unitary, hence normal) 4x4 sector matrix.
pub fn phase_shifted_sector(
    n: usize,
    k: usize,
    t: Complex64,
    r: Complex64,
    phi: f64,
) -> Result<[SpectrumEntry; 4]> {
    if !n.is_multiple_of(2) || n < 4 {
        return Err(WalkError::InvalidParameter(format!(
            "two-periodic ring needs an even size >= 4, got {n}"
        )));
    }
    check_amplitudes(t, r)?;
    if !phi.is_finite() {
        return Err(WalkError::InvalidParameter("phi is not finite".into()));
    }
    let sector = MomentumSector::new(k, n);
    let m = phase_shifted_sector_matrix(sector.theta, t, r, phi);
    let (q, tri) = m.schur().unpack();
    let (mu_plus, mu_minus) = quartic_squared_roots(sector.theta, t, r, phi);
    let degenerate = (mu_plus - mu_minus).norm() < 1e-9;

    let entries = std::array::from_fn(|i| {
        let lambda = tri[(i, i)];
        let col = q.column(i);
        let l2 = lambda * lambda;
        let branch = if degenerate {
            Branch::Degenerate
        } else if (l2 - mu_plus).norm() <= (l2 - mu_minus).norm() {
            Branch::Plus
        } else {
            Branch::Minus
        };
        SpectrumEntry {
            sector,
            branch,
            lambda,
            coeffs: Coefficients::TwoPeriodic {
                a_plus: col[0],
                b_minus: col[1],
                a_minus: col[2],
                b_plus: col[3],
            },
        }
    });
    Ok(entries)
}

/// Spectrum of the two-periodic phase-shifted ring: sectors `k = 0..N/2`
/// (theta and theta + pi label the same two-site sector), four eigenpairs
/// each, `2N` in total.
pub fn phase_shifted_eigensystem(
    n: usize,
    t: Complex64,
    r: Complex64,
    phi: f64,
) -> Result<Vec<SpectrumEntry>> {
    if !n.is_multiple_of(2) {
        return Err(WalkError::InvalidParameter(format!(
            "two-periodic ring needs an even size, got {n}"
        )));
    }
    let mut out = Vec::with_capacity(2 * n);
    for k in 0..n / 2 {
        out.extend(phase_shifted_sector(n, k, t, r, phi)?);
    }
    Ok(out)
}

/// Ratio of even-edge to odd-edge probability of a two-periodic eigenstate.
pub fn even_odd_ratio(entry: &SpectrumEntry) -> Result<f64> {
    match entry.coeffs {
        Coefficients::TwoPeriodic {
            a_plus,
            b_minus,
            a_minus,
            b_plus,
        } => {
            let odd = b_plus.norm_sqr() + b_minus.norm_sqr();
            if odd < 1e-300 {
                return Err(WalkError::InvalidParameter(
                    "eigenstate has zero weight on odd edges".into(),
                ));
            }
            Ok((a_plus.norm_sqr() + a_minus.norm_sqr()) / odd)
        }
        Coefficients::Uniform { .. } => Err(WalkError::InvalidParameter(
            "even/odd ratio needs a two-periodic eigenstate".into(),
        )),
    }
}

/// Whether `N eta / pi` is not an integer, i.e. the ring spectrum has no
/// accidental degeneracies and time averages flatten out.
pub fn uniform_limit_condition(n: usize, t: Complex64) -> Result<bool> {
    if t.norm() == 0.0 {
        return Err(WalkError::InvalidParameter("t = 0".into()));
    }
    let x = n as f64 * transmission_phase(t) / PI;
    Ok((x - x.round()).abs() > 1e-9)
}

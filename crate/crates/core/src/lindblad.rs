// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! GKSL generators, channels and their Choi / Kraus / Stinespring forms.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{eigh, kron, ComplexMatrix, Superoperator, C64};

/// Hamiltonian Hermiticity tolerance, relative to `||H||_F`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Choi eigenvalues of the unit-trace-normalized Choi matrix may dip this far
/// below zero before a map stops counting as CP.
pub const PSD_TOL: f64 = 1e-10;
/// Trace-preservation tolerance on the partial trace of the Choi matrix.
pub const TP_TOL: f64 = 1e-10;

/// `L(X) = -i[H, X] + sum_k (L_k X L_k^dagger - {L_k^dagger L_k, X} / 2)`.
#[derive(Clone, Debug)]
pub struct LindbladGenerator {
    dim: usize,
    hamiltonian: ComplexMatrix,
    jumps: Vec<ComplexMatrix>,
    superop: Superoperator,
}

/// Superoperator of `X -> -i[H, X]`.
pub fn hamiltonian_superoperator(h: &ComplexMatrix) -> Superoperator {
    let d = h.rows();
    let id = ComplexMatrix::identity(d);
    let m = &kron(&id, h) - &kron(&h.transpose(), &id);
    Superoperator::from_matrix(d, m.scale(C64::new(0.0, -1.0))).expect("square hamiltonian")
}

/// Superoperator of `D[L](X) = L X L^dagger - {L^dagger L, X} / 2`.
pub fn dissipator(l: &ComplexMatrix) -> Superoperator {
    let d = l.rows();
    let id = ComplexMatrix::identity(d);
    let ldl = &l.adjoint() * l;
    let mut m = kron(&l.conj(), l);
    m -= &kron(&id, &ldl).scale_re(0.5);
    m -= &kron(&ldl.transpose(), &id).scale_re(0.5);
    Superoperator::from_matrix(d, m).expect("square jump operator")
}

impl LindbladGenerator {
    pub fn new(hamiltonian: ComplexMatrix, jumps: Vec<ComplexMatrix>) -> Result<Self> {
        let d = hamiltonian.require_square()?;
        hamiltonian.check_finite()?;
        let dev = hamiltonian.hermitian_deviation();
        if dev > HERMITIAN_TOL * hamiltonian.norm_fro() {
            return Err(Error::NotHermitian { deviation: dev });
        }
        for (k, l) in jumps.iter().enumerate() {
            if l.shape() != (d, d) {
                return Err(Error::Dimension(format!("jump {k} is {}x{}, hamiltonian is {d}x{d}", l.rows(), l.cols())));
            }
            l.check_finite()?;
        }
        let hamiltonian = hamiltonian.hermitian_part();
        let mut superop = hamiltonian_superoperator(&hamiltonian);
        for l in &jumps {
            superop = superop.add(&dissipator(l));
        }
        Ok(Self { dim: d, hamiltonian, jumps, superop })
    }

    pub fn zero(d: usize) -> Self {
        Self::new(ComplexMatrix::zeros(d, d), Vec::new()).expect("zero generator")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[ComplexMatrix] {
        &self.jumps
    }

    pub fn superoperator(&self) -> &Superoperator {
        &self.superop
    }

    /// `c L`, realized as `H -> c H`, `L_k -> sqrt(c) L_k`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::InvalidParameter(format!("generator scale {c} must be finite and >= 0")));
        }
        let s = libm::sqrt(c);
        Self::new(self.hamiltonian.scale_re(c), self.jumps.iter().map(|l| l.scale_re(s)).collect())
    }

    /// Sum of two generators on the same space.
    pub fn plus(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Dimension(format!("generator sum of d = {} and d = {}", self.dim, other.dim)));
        }
        let mut jumps = self.jumps.clone();
        jumps.extend(other.jumps.iter().cloned());
        Self::new(&self.hamiltonian + &other.hamiltonian, jumps)
    }

    pub fn hamiltonian_part(&self) -> Self {
        Self::new(self.hamiltonian.clone(), Vec::new()).expect("valid parts")
    }

    pub fn dissipative_part(&self) -> Self {
        Self::new(ComplexMatrix::zeros(self.dim, self.dim), self.jumps.clone()).expect("valid parts")
    }

    /// `L (x) id` on `H (x) C^n`.
    pub fn tensor_right(&self, n: usize) -> Self {
        let id = ComplexMatrix::identity(n);
        Self::new(kron(&self.hamiltonian, &id), self.jumps.iter().map(|l| kron(l, &id)).collect())
            .expect("embedding preserves validity")
    }

    /// `id (x) L` on `C^n (x) H`.
    pub fn tensor_left(&self, n: usize) -> Self {
        let id = ComplexMatrix::identity(n);
        Self::new(kron(&id, &self.hamiltonian), self.jumps.iter().map(|l| kron(&id, l)).collect())
            .expect("embedding preserves validity")
    }

    /// `|| vec(I)^dagger L ||`; zero up to rounding for every GKSL generator.
    pub fn trace_annihilation_residual(&self) -> f64 {
        self.superop.trace_preservation_residual()
    }

    pub fn channel(&self, t: f64) -> Result<Channel> {
        channel_from_generator(self, t)
    }
}

/// Alias matching the usual name of the constructor.
pub fn build_generator(h: ComplexMatrix, jumps: Vec<ComplexMatrix>) -> Result<LindbladGenerator> {
    LindbladGenerator::new(h, jumps)
}

/// Verified structure of a linear map, weakest to strongest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum ChannelKind {
    GeneralLinear,
    HermiticityPreserving,
    Cp,
    Cptp,
}

#[derive(Clone, Debug)]
pub struct Channel {
    superop: Superoperator,
    kind: ChannelKind,
    min_choi_eigenvalue: f64,
    trace_defect: f64,
}

/// Structural facts about a map read off its Choi matrix.
#[derive(Clone, Copy, Debug)]
pub struct ChoiFacts {
    pub hermitian: bool,
    /// Smallest eigenvalue of `J / d` (NaN when `J` is not Hermitian).
    pub min_eigenvalue: f64,
    /// `max |Tr_out J - I|`.
    pub trace_defect: f64,
}

pub fn choi_facts(s: &Superoperator) -> Result<ChoiFacts> {
    let d = s.dim();
    let j = s.choi();
    let hermitian = j.hermitian_deviation() <= 1e-10 * j.norm_fro().max(1.0);
    let min_eigenvalue = if hermitian { eigh(&j)?.min() / d.max(1) as f64 } else { f64::NAN };
    let trace_defect = partial_trace_first(&j, d, d).max_abs_diff(&ComplexMatrix::identity(d));
    Ok(ChoiFacts { hermitian, min_eigenvalue, trace_defect })
}

impl Channel {
    /// Classify a map with the default tolerances.
    pub fn classify(superop: Superoperator) -> Result<Self> {
        Self::classify_with(superop, PSD_TOL)
    }

    pub fn classify_with(superop: Superoperator, psd_tol: f64) -> Result<Self> {
        let f = choi_facts(&superop)?;
        let kind = if !f.hermitian {
            ChannelKind::GeneralLinear
        } else if f.min_eigenvalue < -psd_tol {
            ChannelKind::HermiticityPreserving
        } else if f.trace_defect > TP_TOL {
            ChannelKind::Cp
        } else {
            ChannelKind::Cptp
        };
        Ok(Self { superop, kind, min_choi_eigenvalue: f.min_eigenvalue, trace_defect: f.trace_defect })
    }

    /// Classify and insist on CPTP.
    pub fn cptp(superop: Superoperator) -> Result<Self> {
        let c = Self::classify(superop)?;
        if c.kind != ChannelKind::Cptp {
            return Err(Error::NotCptp(format!(
                "kind {:?}, min Choi eigenvalue {:e}, trace defect {:e}",
                c.kind, c.min_choi_eigenvalue, c.trace_defect
            )));
        }
        Ok(c)
    }

    pub fn identity(d: usize) -> Self {
        Self {
            superop: Superoperator::identity(d),
            kind: ChannelKind::Cptp,
            min_choi_eigenvalue: 0.0,
            trace_defect: 0.0,
        }
    }

    pub fn from_kraus(kraus: &[ComplexMatrix]) -> Result<Self> {
        Self::classify(Superoperator::from_kraus(kraus)?)
    }

    pub fn dim(&self) -> usize {
        self.superop.dim()
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn superoperator(&self) -> &Superoperator {
        &self.superop
    }

    pub fn into_superoperator(self) -> Superoperator {
        self.superop
    }

    /// Smallest eigenvalue of the trace-normalized Choi matrix.
    pub fn min_choi_eigenvalue(&self) -> f64 {
        self.min_choi_eigenvalue
    }

    pub fn trace_defect(&self) -> f64 {
        self.trace_defect
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        self.superop.apply(rho)
    }

    /// `self o other`, reclassified.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        Self::classify(self.superop.compose(&other.superop))
    }

    pub fn choi(&self) -> ComplexMatrix {
        self.superop.choi()
    }
}

/// `exp(t L)`, verified CPTP. A failure here means the generator itself is
/// malformed, so it is an error rather than a warning.
pub fn channel_from_generator(g: &LindbladGenerator, t: f64) -> Result<Channel> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("time {t} must be finite and >= 0")));
    }
    Channel::cptp(g.superoperator().exp(t)?)
}

pub fn choi(c: &Channel) -> ComplexMatrix {
    c.choi()
}

/// `Tr_1` of an operator on `C^d1 (x) C^d2`.
pub fn partial_trace_first(m: &ComplexMatrix, d1: usize, d2: usize) -> ComplexMatrix {
    assert_eq!(m.shape(), (d1 * d2, d1 * d2), "partial trace dimension mismatch");
    ComplexMatrix::from_fn(d2, d2, |i, j| (0..d1).map(|a| m[(a * d2 + i, a * d2 + j)]).sum())
}

/// `Tr_2` of an operator on `C^d1 (x) C^d2`.
pub fn partial_trace_second(m: &ComplexMatrix, d1: usize, d2: usize) -> ComplexMatrix {
    assert_eq!(m.shape(), (d1 * d2, d1 * d2), "partial trace dimension mismatch");
    ComplexMatrix::from_fn(d1, d1, |i, j| (0..d2).map(|a| m[(i * d2 + a, j * d2 + a)]).sum())
}

/// Kraus operators from a Choi matrix.
#[derive(Clone, Debug)]
pub struct KrausDecomposition {
    pub operators: Vec<ComplexMatrix>,
    /// Most negative Choi eigenvalue that was clipped to zero (0 if none).
    pub clipped: f64,
}

/// Canonical Kraus set from the eigendecomposition of `J`; eigenvalues below
/// `1e-12 tr J` are discarded.
pub fn kraus_from_choi(j: &ComplexMatrix) -> Result<KrausDecomposition> {
    let dd = j.require_square()?;
    let d = libm::round(libm::sqrt(dd as f64)) as usize;
    if d * d != dd {
        return Err(Error::Dimension(format!("Choi matrix side {dd} is not a square number")));
    }
    let e = eigh(j)?;
    let scale = e.values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let min = e.min();
    if min < -1e-6 * scale {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    let tr: f64 = e.values.iter().sum();
    let mut operators = Vec::new();
    for (k, &lam) in e.values.iter().enumerate().rev() {
        if lam <= 1e-12 * tr {
            continue;
        }
        let s = libm::sqrt(lam);
        let u = e.vectors.col(k);
        operators.push(ComplexMatrix::from_fn(d, d, |a, i| u[a * d + i] * s));
    }
    Ok(KrausDecomposition { operators, clipped: min.min(0.0) })
}

/// `V = sum_k |k> (x) K_k`, i.e. the Kraus operators stacked as row blocks,
/// environment index first.
pub fn stinespring_isometry(kraus: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let Some(first) = kraus.first() else {
        return Err(Error::IncompleteKraus { deviation: 1.0 });
    };
    let d = first.require_square()?;
    let mut completeness = ComplexMatrix::zeros(d, d);
    for k in kraus {
        if k.shape() != (d, d) {
            return Err(Error::Dimension("Kraus operators differ in shape".to_string()));
        }
        completeness += &(&k.adjoint() * k);
    }
    let deviation = completeness.max_abs_diff(&ComplexMatrix::identity(d));
    if deviation > 1e-8 {
        return Err(Error::IncompleteKraus { deviation });
    }
    let m = kraus.len();
    Ok(ComplexMatrix::from_fn(m * d, d, |r, c| kraus[r / d][(r % d, c)]))
}

/// `Tr_env[V rho V^dagger]` for an isometry from [`stinespring_isometry`].
pub fn apply_stinespring(v: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    let d = v.cols();
    let m = v.rows() / d;
    partial_trace_first(&(&(v * rho) * &v.adjoint()), m, d)
}

/// Standard operators. Qubits use `|g> = index 0`, `|e> = index 1`.
pub mod ops {
    use super::*;

    /// Truncated annihilator on `levels` Fock states.
    pub fn annihilation(levels: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(levels, levels, |i, j| {
            if j == i + 1 {
                C64::new(libm::sqrt(j as f64), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn number(levels: usize) -> ComplexMatrix {
        let a = annihilation(levels);
        &a.adjoint() * &a
    }

    /// `|g><e|`.
    pub fn sigma_minus() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0., 1., 0., 0.]).expect("literal")
    }

    pub fn sigma_plus() -> ComplexMatrix {
        sigma_minus().adjoint()
    }

    /// `|e><e| - |g><g| = diag(-1, 1)`.
    pub fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::from_real_diag(&[-1.0, 1.0])
    }

    pub fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0., 1., 1., 0.]).expect("literal")
    }

    pub fn pauli_y() -> ComplexMatrix {
        let z = C64::new(0.0, 0.0);
        ComplexMatrix::from_row_major(2, 2, &[z, C64::new(0.0, -1.0), C64::new(0.0, 1.0), z]).expect("literal")
    }

    /// Computational-basis `diag(1, -1)`.
    pub fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real_diag(&[1.0, -1.0])
    }

    /// `|i><j|` on `C^d`.
    pub fn unit(d: usize, i: usize, j: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(i, j)] = C64::new(1.0, 0.0);
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigenvalues, expm};
    use crate::rng;

    fn damping(kappa: f64, levels: usize) -> LindbladGenerator {
        LindbladGenerator::new(
            ComplexMatrix::zeros(levels, levels),
            alloc::vec![ops::annihilation(levels).scale_re(libm::sqrt(kappa))],
        )
        .unwrap()
    }

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| b.re.total_cmp(&a.re));
        v
    }

    #[test]
    fn zero_generator() {
        let g = build_generator(ComplexMatrix::zeros(3, 3), Vec::new()).unwrap();
        assert_eq!(g.superoperator().matrix(), &ComplexMatrix::zeros(9, 9));
    }

    #[test]
    fn damping_spectrum_two_levels() {
        let kappa = 2.5;
        let ev = sorted(eigenvalues(damping(kappa, 2).superoperator().matrix()).unwrap());
        let want = [0.0, -kappa / 2.0, -kappa / 2.0, -kappa];
        for (z, w) in ev.iter().zip(want) {
            assert!((z - C64::new(w, 0.0)).norm() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn hamiltonian_spectrum_is_imaginary() {
        let w = 1.7;
        let g = LindbladGenerator::new(ops::sigma_z().scale_re(w / 2.0), Vec::new()).unwrap();
        let mut ev = eigenvalues(g.superoperator().matrix()).unwrap();
        ev.sort_by(|a, b| a.im.total_cmp(&b.im));
        let want = [-w, 0.0, 0.0, w];
        for (z, w) in ev.iter().zip(want) {
            assert!((z - C64::new(0.0, w)).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let h = ComplexMatrix::from_real(2, 2, &[0., 1., 0., 0.]).unwrap();
        assert!(matches!(LindbladGenerator::new(h, Vec::new()), Err(Error::NotHermitian { .. })));
        let ok = ComplexMatrix::zeros(2, 2);
        assert!(LindbladGenerator::new(ok, alloc::vec![ComplexMatrix::zeros(3, 3)]).is_err());
    }

    #[test]
    fn damping_relaxes_to_vacuum() {
        let kappa = 1.3;
        let c = channel_from_generator(&damping(kappa, 4), 50.0 / kappa).unwrap();
        let rho = rng::density(&mut rng::stream(3, 0), 4, 4);
        let out = c.apply(&rho);
        let vac = ops::unit(4, 0, 0);
        assert!(crate::linalg::trace_norm(&(&out - &vac)).unwrap() < 1e-10);
        let t0 = channel_from_generator(&damping(kappa, 4), 0.0).unwrap();
        assert_eq!(t0.superoperator(), &Superoperator::identity(4));
    }

    #[test]
    fn choi_examples() {
        let id = Channel::identity(2);
        assert!((id.choi().trace().re - 2.0).abs() < 1e-15);
        // Completely depolarizing: Phi(E_ij) = delta_ij I/2, so J = I/2 (x) I.
        let dep = Superoperator::from_map(2, |x| ComplexMatrix::identity(2).scale(x.trace() * 0.5));
        assert!(dep.choi().approx_eq(&ComplexMatrix::identity(4).scale_re(0.5), 1e-15));
        assert_eq!(Channel::classify(dep).unwrap().kind(), ChannelKind::Cptp);
    }

    #[test]
    fn transpose_is_hermiticity_preserving_only() {
        let t = Superoperator::from_map(2, |x| x.transpose());
        assert_eq!(Channel::classify(t).unwrap().kind(), ChannelKind::HermiticityPreserving);
        let skew = Superoperator::left(&ops::sigma_minus()).unwrap();
        assert_eq!(Channel::classify(skew).unwrap().kind(), ChannelKind::GeneralLinear);
    }

    #[test]
    fn amplitude_damping_kraus_pair() {
        let (kappa, t) = (0.8, 0.6);
        let p = 1.0 - libm::exp(-kappa * t);
        let c = channel_from_generator(&damping(kappa, 2), t).unwrap();
        let k = kraus_from_choi(&c.choi()).unwrap().operators;
        assert_eq!(k.len(), 2);
        let k0 = ComplexMatrix::from_real_diag(&[1.0, libm::sqrt(1.0 - p)]);
        let k1 = ops::sigma_minus().scale_re(libm::sqrt(p));
        let matches = |a: &ComplexMatrix, b: &ComplexMatrix| {
            // Equal up to a global phase.
            let ph = b.inner(a);
            ph.norm() > 0.0 && a.approx_eq(&b.scale(ph / ph.norm()), 1e-12)
        };
        assert!(k.iter().any(|x| matches(x, &k0)) && k.iter().any(|x| matches(x, &k1)));
        let v = stinespring_isometry(&k).unwrap();
        assert_eq!(v.shape(), (4, 2));
        assert!((&v.adjoint() * &v).approx_eq(&ComplexMatrix::identity(2), 1e-12));
        let rho = rng::density(&mut rng::stream(5, 0), 2, 2);
        assert!(apply_stinespring(&v, &rho).approx_eq(&c.apply(&rho), 1e-12));
    }

    #[test]
    fn identity_kraus_and_isometry() {
        let k = kraus_from_choi(&Channel::identity(3).choi()).unwrap().operators;
        assert_eq!(k.len(), 1);
        let ph = k[0][(0, 0)];
        assert!(k[0].approx_eq(&ComplexMatrix::identity(3).scale(ph), 1e-12) && (ph.norm() - 1.0).abs() < 1e-12);
        let v = stinespring_isometry(&[ComplexMatrix::identity(2)]).unwrap();
        assert_eq!(v, ComplexMatrix::identity(2));
        assert!(matches!(
            stinespring_isometry(&[ComplexMatrix::identity(2).scale_re(0.5)]),
            Err(Error::IncompleteKraus { .. })
        ));
    }

    #[test]
    fn materially_negative_choi_rejected() {
        let t = Superoperator::from_map(2, |x| x.transpose());
        assert!(matches!(kraus_from_choi(&t.choi()), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn scaled_and_plus_match_superoperators() {
        let g = rng::lindbladian(&mut rng::stream(11, 0), 3, 2, 1.0);
        let h = rng::lindbladian(&mut rng::stream(11, 1), 3, 1, 1.0);
        let s = g.scaled(2.5).unwrap().plus(&h).unwrap();
        let want = g.superoperator().scale(2.5).add(h.superoperator());
        assert!(s.superoperator().matrix().approx_eq(want.matrix(), 1e-12));
        let split = g.hamiltonian_part().plus(&g.dissipative_part()).unwrap();
        assert!(split.superoperator().matrix().approx_eq(g.superoperator().matrix(), 1e-13));
        let _ = expm(g.superoperator().matrix(), 0.1).unwrap();
    }

    #[test]
    fn partial_traces_of_products() {
        let a = rng::density(&mut rng::stream(1, 0), 2, 2);
        let b = rng::density(&mut rng::stream(1, 1), 3, 3);
        let ab = kron(&a, &b);
        assert!(partial_trace_first(&ab, 2, 3).approx_eq(&b, 1e-14));
        assert!(partial_trace_second(&ab, 2, 3).approx_eq(&a, 1e-14));
    }
}

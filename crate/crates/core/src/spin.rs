//! Collective spin states and operators in the symmetric Dicke basis.
//!
//! Index `k` in `0..=N` labels the ket `|J, J - k>` with `J = N/2`, so
//! `k = 0` is the fully polarized `m = +J` state and `k = N` is `m = -J`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest ensemble the dense representation accepts.
pub const MAX_ATOMS: usize = 2000;

/// Tolerance on `|<psi|psi> - 1|` accepted by [`DickeState::new`].
pub const NORM_TOLERANCE: f64 = 1e-10;

const HERMITIAN_TOLERANCE: f64 = 1e-12;
const IMAG_ERROR_THRESHOLD: f64 = 1e-8;

pub(crate) fn check_atoms(n_atoms: usize) -> Result<()> {
    if n_atoms == 0 {
        return Err(Error::invalid("n_atoms must be at least 1"));
    }
    if n_atoms > MAX_ATOMS {
        return Err(Error::invalid(format!(
            "n_atoms = {n_atoms} exceeds the dense-matrix cap of {MAX_ATOMS}"
        )));
    }
    Ok(())
}

/// Total spin `J = N/2`.
pub fn total_spin(n_atoms: usize) -> f64 {
    n_atoms as f64 / 2.0
}

/// Eigenvalue `J(J+1)` of the Casimir operator on the symmetric sector.
pub fn casimir(n_atoms: usize) -> f64 {
    let j = total_spin(n_atoms);
    j * (j + 1.0)
}

/// Magnetic quantum number `m = J - k` of basis index `k`.
pub fn magnetic_number(n_atoms: usize, k: usize) -> f64 {
    total_spin(n_atoms) - k as f64
}

/// Direction of a coherent spin state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::X => f.write_str("x"),
            Axis::Y => f.write_str("y"),
        }
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim_start_matches('+') {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            other => Err(Error::invalid(format!("unknown axis '{other}' (expected x or y)"))),
        }
    }
}

/// Which angular momentum component to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Component {
    Jx,
    Jy,
    Jz,
    Jplus,
    Jminus,
}

/// What a [`CollectiveOperator`] represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorLabel {
    Jx,
    Jy,
    Jz,
    Jplus,
    Jminus,
    Hamiltonian,
}

impl From<Component> for OperatorLabel {
    fn from(c: Component) -> Self {
        match c {
            Component::Jx => OperatorLabel::Jx,
            Component::Jy => OperatorLabel::Jy,
            Component::Jz => OperatorLabel::Jz,
            Component::Jplus => OperatorLabel::Jplus,
            Component::Jminus => OperatorLabel::Jminus,
        }
    }
}

/// Pure state of `N` spin-1/2 particles in the symmetric sector.
#[derive(Clone, Debug, PartialEq)]
pub struct DickeState {
    n_atoms: usize,
    amplitudes: DVector<C64>,
}

impl DickeState {
    /// Wraps an amplitude vector, which must already be normalized.
    pub fn new(n_atoms: usize, amplitudes: DVector<C64>) -> Result<Self> {
        check_atoms(n_atoms)?;
        if amplitudes.len() != n_atoms + 1 {
            return Err(Error::invalid(format!(
                "expected {} amplitudes for N = {n_atoms}, got {}",
                n_atoms + 1,
                amplitudes.len()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::invalid(format!("state norm {norm} is not 1")));
        }
        Ok(DickeState { n_atoms, amplitudes })
    }

    /// Normalizes `amplitudes` before wrapping them.
    pub fn normalized(n_atoms: usize, amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::invalid("cannot normalize a zero or non-finite vector"));
        }
        DickeState::new(n_atoms, amplitudes.unscale(norm))
    }

    /// Coherent spin state polarized along `+x` or `+y`.
    ///
    /// Amplitudes are `2^-J sqrt(C(2J, k))`, times `i^k` for the `+y` state.
    /// The binomial is evaluated in log space so the cap `N = 2000` stays finite.
    pub fn coherent(n_atoms: usize, axis: Axis) -> Result<Self> {
        check_atoms(n_atoms)?;
        let ln_fact = ln_factorials(n_atoms);
        let half_ln2 = total_spin(n_atoms) * std::f64::consts::LN_2;
        let phases = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)];
        let amplitudes = DVector::from_iterator(
            n_atoms + 1,
            (0..=n_atoms).map(|k| {
                let ln_binom = ln_fact[n_atoms] - ln_fact[k] - ln_fact[n_atoms - k];
                let magnitude = (0.5 * ln_binom - half_ln2).exp();
                match axis {
                    Axis::X => C64::new(magnitude, 0.0),
                    Axis::Y => phases[k % 4] * magnitude,
                }
            }),
        );
        DickeState::normalized(n_atoms, amplitudes)
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn dim(&self) -> usize {
        self.n_atoms + 1
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &DickeState) -> Result<C64> {
        same_dim(self.n_atoms, other.n_atoms)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|<self|other>|^2`, insensitive to global phase.
    pub fn fidelity(&self, other: &DickeState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..=n {
        acc += (i as f64).ln();
        out.push(acc);
    }
    out
}

fn same_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Dense `(N+1) x (N+1)` operator on the symmetric sector.
#[derive(Clone, Debug, PartialEq)]
pub struct CollectiveOperator {
    n_atoms: usize,
    matrix: DMatrix<C64>,
    label: OperatorLabel,
}

impl CollectiveOperator {
    /// Wraps a Hamiltonian matrix, checking shape and hermiticity.
    pub fn hamiltonian(n_atoms: usize, matrix: DMatrix<C64>) -> Result<Self> {
        check_atoms(n_atoms)?;
        if matrix.nrows() != n_atoms + 1 || matrix.ncols() != n_atoms + 1 {
            return Err(Error::invalid(format!(
                "Hamiltonian for N = {n_atoms} must be {0}x{0}, got {1}x{2}",
                n_atoms + 1,
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let op = CollectiveOperator { n_atoms, matrix, label: OperatorLabel::Hamiltonian };
        let dev = op.hermiticity_error();
        if dev > HERMITIAN_TOLERANCE * (1.0 + op.max_abs()) {
            return Err(Error::NonHermitian { imag: dev });
        }
        Ok(op)
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn dim(&self) -> usize {
        self.n_atoms + 1
    }

    pub fn label(&self) -> OperatorLabel {
        self.label
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    /// Largest `|O_ij - conj(O_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let adj = self.matrix.adjoint();
        max_abs_diff(&self.matrix, &adj)
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
    }

    /// `O |psi>` as a raw vector.
    pub fn apply(&self, state: &DickeState) -> Result<DVector<C64>> {
        same_dim(self.n_atoms, state.n_atoms)?;
        Ok(&self.matrix * &state.amplitudes)
    }

    /// `[self, other]` as a raw matrix.
    pub fn commutator(&self, other: &CollectiveOperator) -> Result<DMatrix<C64>> {
        same_dim(self.n_atoms, other.n_atoms)?;
        Ok(&self.matrix * &other.matrix - &other.matrix * &self.matrix)
    }
}

/// Elementwise max-norm of `a - b`.
pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter().zip(b.iter()).fold(0.0_f64, |m, (x, y)| m.max((x - y).norm()))
}

/// Builds `Jx`, `Jy`, `Jz`, `J+` or `J-` for `n_atoms` spins.
pub fn build_angular_momentum(n_atoms: usize, component: Component) -> Result<CollectiveOperator> {
    check_atoms(n_atoms)?;
    let dim = n_atoms + 1;
    let j = total_spin(n_atoms);
    let raising = || {
        let mut m = DMatrix::<C64>::zeros(dim, dim);
        for k in 1..dim {
            let mk = magnetic_number(n_atoms, k);
            m[(k - 1, k)] = C64::new((j * (j + 1.0) - mk * (mk + 1.0)).sqrt(), 0.0);
        }
        m
    };
    let matrix = match component {
        Component::Jz => DMatrix::from_diagonal(&DVector::from_iterator(
            dim,
            (0..dim).map(|k| C64::new(magnetic_number(n_atoms, k), 0.0)),
        )),
        Component::Jplus => raising(),
        Component::Jminus => raising().adjoint(),
        Component::Jx => {
            let p = raising();
            (&p + p.adjoint()).scale(0.5)
        }
        Component::Jy => {
            let p = raising();
            // (J+ - J-) / 2i
            (&p - p.adjoint()) * C64::new(0.0, -0.5)
        }
    };
    Ok(CollectiveOperator { n_atoms, matrix, label: component.into() })
}

/// `<psi|O|psi>` for a Hermitian operator.
pub fn expectation(op: &CollectiveOperator, state: &DickeState) -> Result<f64> {
    let applied = op.apply(state)?;
    let raw = state.amplitudes.dotc(&applied);
    if raw.im.abs() > IMAG_ERROR_THRESHOLD * (1.0 + raw.re.abs()) {
        return Err(Error::NonHermitian { imag: raw.im });
    }
    Ok(raw.re)
}

/// `<(AB + BA)/2> - <A><B>` for Hermitian `A`, `B`.
pub fn symmetrized_covariance(
    op_a: &CollectiveOperator,
    op_b: &CollectiveOperator,
    state: &DickeState,
) -> Result<f64> {
    same_dim(op_a.n_atoms, op_b.n_atoms)?;
    let a_psi = op_a.apply(state)?;
    let b_psi = op_b.apply(state)?;
    let mean_a = checked_real(state.amplitudes.dotc(&a_psi))?;
    let mean_b = checked_real(state.amplitudes.dotc(&b_psi))?;
    Ok(a_psi.dotc(&b_psi).re - mean_a * mean_b)
}

fn checked_real(z: C64) -> Result<f64> {
    if z.im.abs() > IMAG_ERROR_THRESHOLD * (1.0 + z.re.abs()) {
        return Err(Error::NonHermitian { imag: z.im });
    }
    Ok(z.re)
}

/// First and second moments of the collective spin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinMoments {
    /// `(<Jx>, <Jy>, <Jz>)`.
    pub mean: [f64; 3],
    /// Symmetrized covariance `<{Ji, Jj}>/2 - <Ji><Jj>`.
    pub covariance: [[f64; 3]; 3],
}

/// The three Cartesian components for one ensemble size, built once and reused.
#[derive(Clone, Debug)]
pub struct SpinOperators {
    n_atoms: usize,
    components: [CollectiveOperator; 3],
}

impl SpinOperators {
    pub fn new(n_atoms: usize) -> Result<Self> {
        Ok(SpinOperators {
            n_atoms,
            components: [
                build_angular_momentum(n_atoms, Component::Jx)?,
                build_angular_momentum(n_atoms, Component::Jy)?,
                build_angular_momentum(n_atoms, Component::Jz)?,
            ],
        })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn jx(&self) -> &CollectiveOperator {
        &self.components[0]
    }

    pub fn jy(&self) -> &CollectiveOperator {
        &self.components[1]
    }

    pub fn jz(&self) -> &CollectiveOperator {
        &self.components[2]
    }

    /// `n . J` for a real 3-vector `n`.
    pub fn along(&self, n: [f64; 3]) -> DMatrix<C64> {
        self.jx().matrix.scale(n[0]) + self.jy().matrix.scale(n[1]) + self.jz().matrix.scale(n[2])
    }

    pub fn moments(&self, state: &DickeState) -> Result<SpinMoments> {
        same_dim(self.n_atoms, state.n_atoms)?;
        let applied: Vec<DVector<C64>> =
            self.components.iter().map(|op| &op.matrix * &state.amplitudes).collect();
        let mut mean = [0.0; 3];
        for (m, v) in mean.iter_mut().zip(&applied) {
            *m = checked_real(state.amplitudes.dotc(v))?;
        }
        let mut covariance = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in i..3 {
                let c = applied[i].dotc(&applied[j]).re - mean[i] * mean[j];
                covariance[i][j] = c;
                covariance[j][i] = c;
            }
        }
        Ok(SpinMoments { mean, covariance })
    }
}

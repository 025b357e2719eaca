//! Dense complex linear algebra over the truncated trap Hilbert space.
//!
//! The space is the tensor product spin ⊗ axial ⊗ cyclotron ⊗ magnetron, in
//! that order. The spin basis lists |↑⟩ before |↓⟩, so `σ_z = diag(+1, −1)`.
//! Motional modes use Fock states truncated at a per-mode dimension; a mode of
//! dimension 1 is frozen in its ground state.
//!
//! Hamiltonians are carried in angular-frequency units (H/ħ), so every
//! propagator is `exp(−i·h·t)`.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result, Warning};

/// A dense complex matrix acting on a single mode or on the full space.
pub type Block = DMatrix<C64>;

/// Hermiticity tolerance, relative to `max(1, max|M_ij|)`.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Population threshold for the truncation tail check.
pub const TAIL_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Spin,
    Axial,
    Cyclotron,
    Magnetron,
}

impl Mode {
    pub const ORDER: [Mode; 4] = [Mode::Spin, Mode::Axial, Mode::Cyclotron, Mode::Magnetron];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    /// σ_z eigenvalue.
    pub fn sign(self) -> i8 {
        match self {
            Spin::Up => 1,
            Spin::Down => -1,
        }
    }

    fn from_index(i: usize) -> Spin {
        if i == 0 {
            Spin::Up
        } else {
            Spin::Down
        }
    }
}

/// Mode content and Fock truncation of a simulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HilbertSpec {
    axial_dim: usize,
    cyclotron_dim: usize,
    magnetron_dim: usize,
}

impl Default for HilbertSpec {
    fn default() -> Self {
        HilbertSpec { axial_dim: 12, cyclotron_dim: 6, magnetron_dim: 1 }
    }
}

impl HilbertSpec {
    pub const SPIN_DIM: usize = 2;

    pub fn new(axial_dim: usize, cyclotron_dim: usize, magnetron_dim: usize) -> Result<Self> {
        if axial_dim < 2 {
            return Err(Error::InvalidDimension(format!("axial_dim must be >= 2, got {axial_dim}")));
        }
        if cyclotron_dim < 1 || magnetron_dim < 1 {
            return Err(Error::InvalidDimension("cyclotron_dim and magnetron_dim must be >= 1".into()));
        }
        Ok(HilbertSpec { axial_dim, cyclotron_dim, magnetron_dim })
    }

    /// Spin and axial mode only; cyclotron and magnetron frozen.
    pub fn spin_axial(axial_dim: usize) -> Result<Self> {
        Self::new(axial_dim, 1, 1)
    }

    pub fn axial_dim(&self) -> usize {
        self.axial_dim
    }

    pub fn cyclotron_dim(&self) -> usize {
        self.cyclotron_dim
    }

    pub fn magnetron_dim(&self) -> usize {
        self.magnetron_dim
    }

    pub fn dim(&self, mode: Mode) -> usize {
        match mode {
            Mode::Spin => Self::SPIN_DIM,
            Mode::Axial => self.axial_dim,
            Mode::Cyclotron => self.cyclotron_dim,
            Mode::Magnetron => self.magnetron_dim,
        }
    }

    pub fn total_dim(&self) -> usize {
        Mode::ORDER.iter().map(|&m| self.dim(m)).product()
    }

    /// Flat index of a product basis state.
    pub fn index(&self, label: BasisLabel) -> Result<usize> {
        if label.n_z >= self.axial_dim || label.n_c >= self.cyclotron_dim || label.n_m >= self.magnetron_dim {
            return Err(Error::InvalidDimension(format!("{label:?} outside {self:?}")));
        }
        let i = label.spin.index();
        let i = i * self.axial_dim + label.n_z;
        let i = i * self.cyclotron_dim + label.n_c;
        Ok(i * self.magnetron_dim + label.n_m)
    }

    pub fn label(&self, mut index: usize) -> BasisLabel {
        let n_m = index % self.magnetron_dim;
        index /= self.magnetron_dim;
        let n_c = index % self.cyclotron_dim;
        index /= self.cyclotron_dim;
        let n_z = index % self.axial_dim;
        index /= self.axial_dim;
        BasisLabel { spin: Spin::from_index(index), n_z, n_c, n_m }
    }

    /// Occupation of `mode` in the basis state at `index` (spin: 0 = ↑, 1 = ↓).
    pub fn occupation(&self, index: usize, mode: Mode) -> usize {
        let l = self.label(index);
        match mode {
            Mode::Spin => l.spin.index(),
            Mode::Axial => l.n_z,
            Mode::Cyclotron => l.n_c,
            Mode::Magnetron => l.n_m,
        }
    }
}

/// Product basis state |spin, n_z, n_c, n_m⟩.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisLabel {
    pub spin: Spin,
    pub n_z: usize,
    pub n_c: usize,
    pub n_m: usize,
}

impl BasisLabel {
    /// |n_z, spin⟩ with cyclotron and magnetron in their ground states.
    pub fn new(n_z: usize, spin: Spin) -> Self {
        BasisLabel { spin, n_z, n_c: 0, n_m: 0 }
    }

    pub fn with_cyclotron(mut self, n_c: usize) -> Self {
        self.n_c = n_c;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    spec: HilbertSpec,
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn basis(spec: HilbertSpec, label: BasisLabel) -> Result<Self> {
        let mut amplitudes = DVector::zeros(spec.total_dim());
        amplitudes[spec.index(label)?] = C64::new(1.0, 0.0);
        Ok(StateVector { spec, amplitudes })
    }

    pub fn from_amplitudes(spec: HilbertSpec, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != spec.total_dim() {
            return Err(Error::InvalidDimension(format!(
                "{} amplitudes for total dimension {}",
                amplitudes.len(),
                spec.total_dim()
            )));
        }
        Ok(StateVector { spec, amplitudes })
    }

    /// Superposition of labelled basis states. Not normalized.
    pub fn from_components(spec: HilbertSpec, components: &[(BasisLabel, C64)]) -> Result<Self> {
        let mut amplitudes = DVector::zeros(spec.total_dim());
        for &(label, c) in components {
            amplitudes[spec.index(label)?] += c;
        }
        Ok(StateVector { spec, amplitudes })
    }

    pub fn spec(&self) -> HilbertSpec {
        self.spec
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    /// Amplitude of a basis state.
    ///
    /// # Panics
    /// If `label` lies outside the truncation.
    pub fn amp(&self, label: BasisLabel) -> C64 {
        let i = self.spec.index(label).expect("basis label outside truncation");
        self.amplitudes[i]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalize(mut self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidInput(format!("cannot normalize state of norm {n}")));
        }
        self.amplitudes.unscale_mut(n);
        Ok(self)
    }

    fn check_spec(&self, other: HilbertSpec) -> Result<()> {
        if self.spec != other {
            return Err(Error::InvalidDimension(format!("spec mismatch: {:?} vs {:?}", self.spec, other)));
        }
        Ok(())
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.check_spec(other.spec)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// ‖self − other‖₂.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        self.check_spec(other.spec)?;
        Ok((&self.amplitudes - &other.amplitudes).norm())
    }

    pub fn apply(&self, op: &Operator) -> Result<StateVector> {
        self.check_spec(op.spec)?;
        Ok(StateVector { spec: self.spec, amplitudes: &op.matrix * &self.amplitudes })
    }

    pub fn expectation(&self, op: &Operator) -> Result<C64> {
        let applied = self.apply(op)?;
        self.inner(&applied)
    }

    /// Reduced occupation distribution of one mode.
    pub fn mode_populations(&self, mode: Mode) -> Vec<f64> {
        let mut pops = vec![0.0; self.spec.dim(mode)];
        for (i, a) in self.amplitudes.iter().enumerate() {
            pops[self.spec.occupation(i, mode)] += a.norm_sqr();
        }
        pops
    }

    /// Population held in the two highest Fock levels of `mode`.
    pub fn tail_population(&self, mode: Mode) -> f64 {
        let pops = self.mode_populations(mode);
        pops.iter().rev().take(2).sum()
    }

    /// Truncation warnings for every motional mode of dimension ≥ 4 whose
    /// top-two levels hold more than [`TAIL_TOL`].
    pub fn truncation_warnings(&self) -> Vec<Warning> {
        [Mode::Axial, Mode::Cyclotron, Mode::Magnetron]
            .into_iter()
            .filter(|&m| self.spec.dim(m) >= 4)
            .filter_map(|mode| {
                let population = self.tail_population(mode);
                (population > TAIL_TOL).then_some(Warning::Truncation { mode, population })
            })
            .collect()
    }

    pub(crate) fn from_raw(spec: HilbertSpec, amplitudes: DVector<C64>) -> Self {
        debug_assert_eq!(amplitudes.len(), spec.total_dim());
        StateVector { spec, amplitudes }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    spec: HilbertSpec,
    matrix: Block,
    hermitian_hint: bool,
}

fn max_abs(m: &Block) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// max |M − M†| over entries.
pub fn hermiticity_defect(m: &Block) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn check_hermitian(m: &Block, what: &str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::ContractViolation(format!("{what}: matrix is not square")));
    }
    let defect = hermiticity_defect(m);
    if defect > HERMITIAN_TOL * max_abs(m).max(1.0) {
        return Err(Error::ContractViolation(format!("{what}: not hermitian (defect {defect:.3e})")));
    }
    Ok(())
}

impl Operator {
    /// Wraps a matrix. With `hermitian_hint` the matrix is checked for
    /// hermiticity.
    pub fn new(spec: HilbertSpec, matrix: Block, hermitian_hint: bool) -> Result<Self> {
        let d = spec.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::InvalidDimension(format!(
                "{}x{} matrix for total dimension {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if hermitian_hint {
            check_hermitian(&matrix, "Operator::new")?;
        }
        Ok(Operator { spec, matrix, hermitian_hint })
    }

    pub fn identity(spec: HilbertSpec) -> Self {
        let d = spec.total_dim();
        Operator { spec, matrix: Block::identity(d, d), hermitian_hint: true }
    }

    pub fn zero(spec: HilbertSpec) -> Self {
        let d = spec.total_dim();
        Operator { spec, matrix: Block::zeros(d, d), hermitian_hint: true }
    }

    pub fn spec(&self) -> HilbertSpec {
        self.spec
    }

    pub fn matrix(&self) -> &Block {
        &self.matrix
    }

    pub fn into_matrix(self) -> Block {
        self.matrix
    }

    pub fn hermitian_hint(&self) -> bool {
        self.hermitian_hint
    }

    pub fn entry(&self, row: BasisLabel, col: BasisLabel) -> Result<C64> {
        Ok(self.matrix[(self.spec.index(row)?, self.spec.index(col)?)])
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.matrix)
    }

    /// max |U†U − I| over entries.
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.matrix.nrows();
        max_abs(&(self.matrix.adjoint() * &self.matrix - Block::identity(d, d)))
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.matrix)
    }

    pub fn adjoint(&self) -> Operator {
        Operator { spec: self.spec, matrix: self.matrix.adjoint(), hermitian_hint: self.hermitian_hint }
    }

    pub fn scale(&self, s: f64) -> Operator {
        Operator { spec: self.spec, matrix: &self.matrix * C64::new(s, 0.0), hermitian_hint: self.hermitian_hint }
    }

    pub fn compose(&self, rhs: &Operator) -> Result<Operator> {
        self.same_spec(rhs)?;
        Ok(Operator { spec: self.spec, matrix: &self.matrix * &rhs.matrix, hermitian_hint: false })
    }

    /// [self, rhs].
    pub fn commutator(&self, rhs: &Operator) -> Result<Operator> {
        self.same_spec(rhs)?;
        let m = &self.matrix * &rhs.matrix - &rhs.matrix * &self.matrix;
        Ok(Operator { spec: self.spec, matrix: m, hermitian_hint: false })
    }

    fn same_spec(&self, rhs: &Operator) -> Result<()> {
        if self.spec != rhs.spec {
            return Err(Error::InvalidDimension(format!("spec mismatch: {:?} vs {:?}", self.spec, rhs.spec)));
        }
        Ok(())
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.spec, rhs.spec, "operator spec mismatch");
        Operator {
            spec: self.spec,
            matrix: &self.matrix + &rhs.matrix,
            hermitian_hint: self.hermitian_hint && rhs.hermitian_hint,
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.spec, rhs.spec, "operator spec mismatch");
        Operator {
            spec: self.spec,
            matrix: &self.matrix - &rhs.matrix,
            hermitian_hint: self.hermitian_hint && rhs.hermitian_hint,
        }
    }
}

impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        self.compose(rhs).expect("operator spec mismatch")
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Truncated annihilation and creation operators of a `dim`-level oscillator.
pub fn ladder(dim: usize) -> Result<(Block, Block)> {
    if dim < 2 {
        return Err(Error::InvalidDimension(format!("ladder needs dim >= 2, got {dim}")));
    }
    let lowering = Block::from_fn(dim, dim, |i, j| if j == i + 1 { c((j as f64).sqrt(), 0.0) } else { c(0.0, 0.0) });
    let raising = lowering.adjoint();
    Ok((lowering, raising))
}

pub fn number(dim: usize) -> Block {
    Block::from_diagonal(&DVector::from_fn(dim, |i, _| c(i as f64, 0.0)))
}

pub fn sigma_x() -> Block {
    Block::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn sigma_y() -> Block {
    Block::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn sigma_z() -> Block {
    Block::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

/// σ₊ = |↑⟩⟨↓|.
pub fn sigma_plus() -> Block {
    Block::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
}

/// σ₋ = |↓⟩⟨↑|.
pub fn sigma_minus() -> Block {
    sigma_plus().adjoint()
}

/// Identity-padded Kronecker embedding of a single-mode block.
pub fn embed(block: &Block, mode: Mode, spec: HilbertSpec) -> Result<Operator> {
    let d = spec.dim(mode);
    if block.nrows() != d || block.ncols() != d {
        return Err(Error::InvalidDimension(format!(
            "{}x{} block for {mode:?} of dimension {d}",
            block.nrows(),
            block.ncols()
        )));
    }
    let mut acc = Block::identity(1, 1);
    for m in Mode::ORDER {
        acc = if m == mode {
            acc.kronecker(block)
        } else {
            let dm = spec.dim(m);
            acc.kronecker(&Block::identity(dm, dm))
        };
    }
    let hermitian_hint = hermiticity_defect(block) <= HERMITIAN_TOL * max_abs(block).max(1.0);
    Ok(Operator { spec, matrix: acc, hermitian_hint })
}

/// exp(−i·h·dt) for a hermitian matrix via its eigendecomposition.
pub(crate) fn exp_hermitian(h: &Block, dt: f64) -> Block {
    let eig = SymmetricEigen::new(h.clone());
    let phases = eig.eigenvalues.map(|l| C64::from_polar(1.0, -l * dt));
    let mut scaled = eig.eigenvectors.clone();
    for (j, p) in phases.iter().enumerate() {
        for z in scaled.column_mut(j).iter_mut() {
            *z *= p;
        }
    }
    scaled * eig.eigenvectors.adjoint()
}

/// U = exp(−i·h·duration), `h` in angular-frequency units.
pub fn propagator(h: &Operator, duration: f64) -> Result<Operator> {
    if !(duration >= 0.0) || !duration.is_finite() {
        return Err(Error::InvalidInput(format!("duration must be finite and >= 0, got {duration}")));
    }
    check_hermitian(&h.matrix, "propagator")?;
    if duration == 0.0 {
        return Ok(Operator::identity(h.spec));
    }
    Ok(Operator { spec: h.spec, matrix: exp_hermitian(&h.matrix, duration), hermitian_hint: false })
}

/// V·f(Λ)·V† for hermitian `h = V·Λ·V†`.
pub fn hermitian_function(h: &Block, f: impl Fn(f64) -> f64) -> Result<Block> {
    check_hermitian(h, "hermitian_function")?;
    let eig = SymmetricEigen::new(h.clone());
    let mut scaled = eig.eigenvectors.clone();
    for (j, &l) in eig.eigenvalues.iter().enumerate() {
        let fl = f(l);
        for z in scaled.column_mut(j).iter_mut() {
            *z *= fl;
        }
    }
    let out = scaled * eig.eigenvectors.adjoint();
    // Real f keeps the result hermitian; symmetrize away rounding.
    Ok((&out + out.adjoint()) * C64::new(0.5, 0.0))
}

pub fn hermitian_matrix_function(h: &Operator, f: impl Fn(f64) -> f64) -> Result<Operator> {
    let m = hermitian_function(&h.matrix, f)?;
    Ok(Operator { spec: h.spec, matrix: m, hermitian_hint: true })
}

/// Uniform step count and width covering `[t0, t1]` with steps no longer than `step`.
pub(crate) fn step_grid(t0: f64, t1: f64, step: f64) -> Result<(usize, f64)> {
    if !(t1 >= t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::InvalidInput(format!("need t1 >= t0, got [{t0}, {t1}]")));
    }
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidInput(format!("step must be > 0, got {step}")));
    }
    let span = t1 - t0;
    if span == 0.0 {
        return Ok((0, 0.0));
    }
    let n = ((span / step) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    Ok((n, span / n as f64))
}

/// Midpoint piecewise-constant propagation of a block of column states:
/// `cols ← exp(−i·h(t + dt/2)·dt)·cols` per step.
pub fn evolve_columns(
    mut h_of_t: impl FnMut(f64) -> Block,
    mut cols: Block,
    t0: f64,
    t1: f64,
    step: f64,
) -> Result<Block> {
    let (n, dt) = step_grid(t0, t1, step)?;
    for k in 0..n {
        let t_mid = t0 + (k as f64 + 0.5) * dt;
        let h = h_of_t(t_mid);
        if h.nrows() != cols.nrows() {
            return Err(Error::InvalidDimension(format!(
                "hamiltonian dimension {} vs state dimension {}",
                h.nrows(),
                cols.nrows()
            )));
        }
        check_hermitian(&h, "evolve_timedep sample")?;
        cols = exp_hermitian(&h, dt) * cols;
    }
    Ok(cols)
}

/// Time-dependent evolution by the midpoint exponential rule. The interval is
/// split into uniform steps no longer than `step`.
pub fn evolve_timedep(
    mut h_of_t: impl FnMut(f64) -> Operator,
    state: &StateVector,
    t0: f64,
    t1: f64,
    step: f64,
) -> Result<StateVector> {
    let spec = state.spec;
    let cols = Block::from_column_slice(spec.total_dim(), 1, state.amplitudes.as_slice());
    let out = evolve_columns(|t| h_of_t(t).matrix, cols, t0, t1, step)?;
    Ok(StateVector { spec, amplitudes: out.column(0).into_owned() })
}

/// |⟨a|b⟩|².
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().clamp(0.0, 1.0))
}

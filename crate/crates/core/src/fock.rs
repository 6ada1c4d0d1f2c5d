//! Exact numerics on small truncated multimode Fock spaces.
//!
//! This is the independent check of the operator algebra behind the two-term
//! condensate radiation formula: ladder operators with standard sqrt(n)
//! amplitudes, packet coherent/Fock states, second quantization of one-body
//! operators, the normal-ordering identity, and the reduction of <O^2> on a
//! coherent state to n^2 (phi'O phi)^2 + n (phi'O^2 phi).
//!
//! Truncation is by total occupation, which keeps every number-conserving
//! operator exact on the whole space; identities that involve raising are
//! asserted on safely truncated subspaces only.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Truncated bosonic arena: all occupation tuples over `n_modes` modes with
/// total occupation at most `n_max`, enumerated in graded lexicographic order
/// (by total, then ascending lex), so every truncation cut is a leading block.
#[derive(Debug, Clone)]
pub struct FockSpace {
    n_modes: usize,
    n_max: usize,
    basis: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
}

fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

fn compositions(total: u8, parts: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if parts == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in 0..=total {
        prefix.push(first);
        compositions(total - first, parts - 1, prefix, out);
        prefix.pop();
    }
}

impl FockSpace {
    pub fn new(n_modes: usize, n_max: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidParameter {
                name: "n_modes",
                value: 0.0,
                rule: "must be at least 1",
            });
        }
        if n_max == 0 || n_max > 64 {
            return Err(Error::InvalidParameter {
                name: "n_max",
                value: n_max as f64,
                rule: "must be between 1 and 64",
            });
        }
        let mut basis = Vec::with_capacity(binomial(n_max + n_modes, n_modes));
        for total in 0..=n_max {
            let mut prefix = Vec::with_capacity(n_modes);
            compositions(total as u8, n_modes, &mut prefix, &mut basis);
        }
        let index = basis
            .iter()
            .enumerate()
            .map(|(i, occ)| (occ.clone(), i))
            .collect();
        Ok(FockSpace { n_modes, n_max, basis, index })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<u8>] {
        &self.basis
    }

    pub fn index_of(&self, occupation: &[u8]) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    pub fn total_occupation(&self, idx: usize) -> usize {
        self.basis[idx].iter().map(|&n| n as usize).sum()
    }

    /// Number of basis states with total occupation <= `cap`; since the basis
    /// is graded these occupy the leading indices.
    pub fn sector_cutoff(&self, cap: usize) -> usize {
        binomial(cap.min(self.n_max) + self.n_modes, self.n_modes)
    }

    fn check_modes(&self, m: usize) -> Result<()> {
        if m != self.n_modes {
            return Err(Error::OperatorSizeMismatch { expected: self.n_modes, got: m });
        }
        Ok(())
    }
}

/// Single-particle mode amplitudes phi_k (normalized) plus the coherent
/// amplitude z, with mean particle number |z|^2.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeAmplitudes {
    pub phi: Vec<Complex64>,
    pub z: Complex64,
}

impl ModeAmplitudes {
    pub fn new(phi: Vec<Complex64>, z: Complex64) -> Result<Self> {
        let norm: f64 = phi.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::UnnormalizedAmplitudes(norm));
        }
        Ok(ModeAmplitudes { phi, z })
    }

    pub fn n_mean(&self) -> f64 {
        self.z.norm_sqr()
    }
}

/// Mode-space matrix elements of a one-body operator.
#[derive(Debug, Clone, PartialEq)]
pub struct OneBodyOperator {
    pub matrix: CMatrix,
}

impl OneBodyOperator {
    pub fn new(matrix: CMatrix) -> Self {
        OneBodyOperator { matrix }
    }

    pub fn identity(n_modes: usize) -> Self {
        OneBodyOperator { matrix: CMatrix::identity(n_modes, n_modes) }
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let adj = self.matrix.adjoint();
        (&self.matrix - adj).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Random Hermitian matrix with entries of order one; seeded callers get
    /// reproducible draws.
    pub fn random_hermitian<R: Rng>(rng: &mut R, n_modes: usize) -> Self {
        let a = CMatrix::from_fn(n_modes, n_modes, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let h = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
        OneBodyOperator { matrix: h }
    }
}

/// Annihilation/creation matrix pairs (b_k, b_k^dagger) for every mode.
pub fn ladder_operators(space: &FockSpace) -> Vec<(CMatrix, CMatrix)> {
    let dim = space.dimension();
    (0..space.n_modes())
        .map(|k| {
            let mut lower = CMatrix::zeros(dim, dim);
            for (col, occ) in space.basis().iter().enumerate() {
                if occ[k] == 0 {
                    continue;
                }
                let mut target = occ.clone();
                target[k] -= 1;
                let row = space.index_of(&target).expect("lowering stays in the space");
                lower[(row, col)] = Complex64::new((occ[k] as f64).sqrt(), 0.0);
            }
            let raise = lower.adjoint();
            (lower, raise)
        })
        .collect()
}

/// Total number operator (diagonal, exact integers).
pub fn number_operator(space: &FockSpace) -> CMatrix {
    let dim = space.dimension();
    let mut n = CMatrix::zeros(dim, dim);
    for idx in 0..dim {
        n[(idx, idx)] = Complex64::new(space.total_occupation(idx) as f64, 0.0);
    }
    n
}

/// Apply the packet creation operator sum_k phi_k b_k^dagger; amplitude that
/// would leave the truncated space is dropped.
fn apply_packet_creation(space: &FockSpace, phi: &[Complex64], v: &CVector) -> CVector {
    let mut out = CVector::zeros(space.dimension());
    for (idx, occ) in space.basis().iter().enumerate() {
        let amp = v[idx];
        if amp == Complex64::default() {
            continue;
        }
        if space.total_occupation(idx) >= space.n_max() {
            continue;
        }
        let mut target = occ.clone();
        for k in 0..space.n_modes() {
            target[k] += 1;
            let row = space.index_of(&target).expect("raising below n_max stays in the space");
            out[row] += phi[k] * ((occ[k] + 1) as f64).sqrt() * amp;
            target[k] -= 1;
        }
    }
    out
}

fn vacuum(space: &FockSpace) -> CVector {
    let mut v = CVector::zeros(space.dimension());
    v[0] = Complex64::new(1.0, 0.0);
    v
}

/// Poisson weight beyond the truncation, |z|^(2(n_max+1)) / (n_max+1)!.
fn truncation_tail(n_mean: f64, n_max: usize) -> f64 {
    (1..=n_max + 1).fold(1.0, |acc, j| acc * n_mean / j as f64)
}

pub const TRUNCATION_TAIL_LIMIT: f64 = 1e-14;

/// exp(-|z|^2/2) exp(z sum_k phi_k b_k^dagger)|0>, evaluated by series.
pub fn coherent_state(space: &FockSpace, amps: &ModeAmplitudes) -> Result<CVector> {
    space.check_modes(amps.phi.len())?;
    let n_mean = amps.n_mean();
    let tail = truncation_tail(n_mean, space.n_max());
    if tail >= TRUNCATION_TAIL_LIMIT {
        return Err(Error::TruncationGuard { n_mean, n_max: space.n_max(), tail });
    }
    let mut state = vacuum(space);
    let mut term = state.clone();
    for n in 1..=space.n_max() {
        term = apply_packet_creation(space, &amps.phi, &term) * (amps.z / n as f64);
        state += &term;
    }
    Ok(state * Complex64::new((-0.5 * n_mean).exp(), 0.0))
}

/// (1/sqrt(n!)) (sum_k phi_k b_k^dagger)^n |0>.
pub fn fock_state(space: &FockSpace, amps: &ModeAmplitudes, n: usize) -> Result<CVector> {
    space.check_modes(amps.phi.len())?;
    if n > space.n_max() {
        return Err(Error::OccupationTooLarge { n, n_max: space.n_max() });
    }
    let mut state = vacuum(space);
    for _ in 0..n {
        state = apply_packet_creation(space, &amps.phi, &state);
    }
    let factorial = (1..=n).fold(1.0f64, |acc, j| acc * j as f64);
    Ok(state / Complex64::new(factorial.sqrt(), 0.0))
}

/// Fock-space matrix of sum_kl O_kl b_k^dagger b_l, built directly in the
/// occupation basis. Number-conserving, hence exact on the whole truncated
/// space; diagonal (k = l) amplitudes are exact integers.
pub fn second_quantize(space: &FockSpace, op: &OneBodyOperator) -> Result<CMatrix> {
    space.check_modes(op.matrix.nrows())?;
    space.check_modes(op.matrix.ncols())?;
    let dim = space.dimension();
    let m = space.n_modes();
    let mut out = CMatrix::zeros(dim, dim);
    for (col, occ) in space.basis().iter().enumerate() {
        for l in 0..m {
            if occ[l] == 0 {
                continue;
            }
            for k in 0..m {
                if k == l {
                    out[(col, col)] += op.matrix[(k, l)] * occ[l] as f64;
                } else {
                    let mut target = occ.clone();
                    target[l] -= 1;
                    target[k] += 1;
                    let row = space
                        .index_of(&target)
                        .expect("number-conserving move stays in the space");
                    let coeff = ((occ[l] as f64) * ((occ[k] + 1) as f64)).sqrt();
                    out[(row, col)] += op.matrix[(k, l)] * coeff;
                }
            }
        }
    }
    Ok(out)
}

/// Residual of the normal-ordering identity
///   (b'Ob)(b'O'b) = sum b'b' O O' bb + b'(OO')b
/// as a max matrix-element deviation, restricted to the total-occupation
/// <= n_max - 2 block where truncation cannot interfere.
pub fn verify_ordering_identity(
    space: &FockSpace,
    op_i: &OneBodyOperator,
    op_j: &OneBodyOperator,
) -> Result<f64> {
    let m = space.n_modes();
    space.check_modes(op_i.matrix.nrows())?;
    space.check_modes(op_j.matrix.nrows())?;

    let lhs = second_quantize(space, op_i)? * second_quantize(space, op_j)?;
    let contraction =
        second_quantize(space, &OneBodyOperator::new(&op_i.matrix * &op_j.matrix))?;

    let ladders = ladder_operators(space);
    let dim = space.dimension();
    let mut two_body = CMatrix::zeros(dim, dim);
    for l in 0..m {
        for lp in 0..m {
            let bb = &ladders[l].0 * &ladders[lp].0;
            for kp in 0..m {
                let mid = &ladders[kp].1 * &bb;
                for k in 0..m {
                    let weight = op_i.matrix[(k, l)] * op_j.matrix[(kp, lp)];
                    if weight != Complex64::default() {
                        two_body += (&ladders[k].1 * &mid) * weight;
                    }
                }
            }
        }
    }

    let cutoff = if space.n_max() >= 2 { space.sector_cutoff(space.n_max() - 2) } else { 0 };
    let mut residual = 0.0f64;
    for r in 0..cutoff {
        for c in 0..cutoff {
            residual = residual.max((lhs[(r, c)] - two_body[(r, c)] - contraction[(r, c)]).norm());
        }
    }
    Ok(residual)
}

/// Both sides of the coherent-state reduction of <O^2>.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoTermCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// lhs = <psi_c|O^2|psi_c> by direct matrix application; rhs is the two-term
/// combination n^2 (phi'O phi)^2 + n (phi'O^2 phi) with n = |z|^2.
pub fn verify_two_term_reduction(
    space: &FockSpace,
    amps: &ModeAmplitudes,
    op: &OneBodyOperator,
) -> Result<TwoTermCheck> {
    let psi = coherent_state(space, amps)?;
    let o_hat = second_quantize(space, op)?;
    let o_psi = &o_hat * &psi;
    let oo_psi = &o_hat * &o_psi;
    let lhs = psi.dotc(&oo_psi).re;

    let phi = CVector::from_column_slice(&amps.phi);
    let o_phi = &op.matrix * &phi;
    let exp1 = phi.dotc(&o_phi).re;
    let exp2 = phi.dotc(&(&op.matrix * &o_phi)).re;
    let n = amps.n_mean();
    let rhs = n * n * exp1 * exp1 + n * exp2;
    Ok(TwoTermCheck { lhs, rhs, residual: (lhs - rhs).abs() })
}

/// Max residual of b_k|psi_c> = z phi_k |psi_c> per mode, on the
/// total-occupation <= n_max - 1 block.
pub fn coherent_eigenvalue_residual(
    space: &FockSpace,
    amps: &ModeAmplitudes,
    psi: &CVector,
) -> f64 {
    let cutoff = space.sector_cutoff(space.n_max() - 1);
    let mut residual = 0.0f64;
    for k in 0..space.n_modes() {
        let mut lowered = CVector::zeros(space.dimension());
        for (idx, occ) in space.basis().iter().enumerate() {
            if occ[k] == 0 {
                continue;
            }
            let mut target = occ.clone();
            target[k] -= 1;
            let row = space.index_of(&target).expect("lowering stays in the space");
            lowered[row] += (occ[k] as f64).sqrt() * psi[idx];
        }
        let scale = amps.z * amps.phi[k];
        for idx in 0..cutoff {
            residual = residual.max((lowered[idx] - scale * psi[idx]).norm());
        }
    }
    residual
}

/// <N> on a state vector; the number operator is diagonal with exact integers.
pub fn number_mean(space: &FockSpace, psi: &CVector) -> f64 {
    psi.iter()
        .enumerate()
        .map(|(idx, c)| space.total_occupation(idx) as f64 * c.norm_sqr())
        .sum()
}

pub mod report {
    //! Machine-readable oracle run: every algebraic residual against its
    //! threshold, from seeded random draws.

    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use serde::Serialize;

    #[derive(Debug, Clone, Copy, Serialize)]
    pub struct ResidualCheck {
        pub value: f64,
        pub threshold: f64,
        pub pass: bool,
    }

    impl ResidualCheck {
        fn new(value: f64, threshold: f64) -> Self {
            ResidualCheck { value, threshold, pass: value < threshold }
        }
    }

    #[derive(Debug, Clone, Serialize)]
    pub struct OracleReport {
        pub seed: u64,
        pub trials: usize,
        pub n_modes: usize,
        pub n_max_two_term: usize,
        pub n_max_ordering: usize,
        pub ccr_commutator: ResidualCheck,
        pub cross_mode_commutator: ResidualCheck,
        pub coherent_norm: ResidualCheck,
        pub coherent_eigenvalue: ResidualCheck,
        pub number_mean: ResidualCheck,
        pub fock_norm: ResidualCheck,
        pub one_particle_sector: ResidualCheck,
        pub ordering_identity: ResidualCheck,
        pub two_term_reduction: ResidualCheck,
        pub two_term_fock_counterpart: ResidualCheck,
        pub all_pass: bool,
    }

    pub fn random_amplitudes<R: Rng>(rng: &mut R, n_modes: usize) -> ModeAmplitudes {
        let mut phi: Vec<Complex64> = (0..n_modes)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm: f64 = phi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for c in &mut phi {
            *c /= norm;
        }
        // Mean particle number kept under the truncation guard for n_max = 8.
        let n_mean: f64 = rng.gen_range(0.02..0.095);
        let phase = rng.gen_range(0.0..std::f64::consts::TAU);
        let z = Complex64::from_polar(n_mean.sqrt(), phase);
        ModeAmplitudes::new(phi, z).expect("normalized by construction")
    }

    /// Run the whole residual suite with `trials` random draws.
    pub fn run_oracle(seed: u64, trials: usize) -> Result<OracleReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_modes = 3;
        let space = FockSpace::new(n_modes, 8)?;
        let space_ordering = FockSpace::new(n_modes, 6)?;

        // CCR on the safely truncated block, all modes of both spaces.
        let mut ccr = 0.0f64;
        let mut cross = 0.0f64;
        for sp in [&space, &space_ordering] {
            let ladders = ladder_operators(sp);
            let cutoff = sp.sector_cutoff(sp.n_max() - 1);
            for (k, (b_k, bd_k)) in ladders.iter().enumerate() {
                let comm = b_k * bd_k - bd_k * b_k;
                for r in 0..cutoff {
                    for c in 0..cutoff {
                        let expect = if r == c { 1.0 } else { 0.0 };
                        ccr = ccr.max((comm[(r, c)] - Complex64::new(expect, 0.0)).norm());
                    }
                }
                for (l, (b_l, bd_l)) in ladders.iter().enumerate() {
                    if l == k {
                        continue;
                    }
                    // Like-mode CCR, these hold only below the top sector,
                    // where raising cannot clip.
                    let comm = b_k * bd_l - bd_l * b_k;
                    let comm2 = b_k * b_l - b_l * b_k;
                    for r in 0..cutoff {
                        for c in 0..cutoff {
                            cross = cross.max(comm[(r, c)].norm());
                            cross = cross.max(comm2[(r, c)].norm());
                        }
                    }
                }
            }
        }

        // One-particle sector of a random Hermitian operator embeds exactly.
        let probe = OneBodyOperator::random_hermitian(&mut rng, n_modes);
        let o_hat = second_quantize(&space, &probe)?;
        let mut sector = 0.0f64;
        for k in 0..n_modes {
            let mut ek = vec![0u8; n_modes];
            ek[k] = 1;
            let row = space.index_of(&ek).unwrap();
            for l in 0..n_modes {
                let mut el = vec![0u8; n_modes];
                el[l] = 1;
                let col = space.index_of(&el).unwrap();
                sector = sector.max((o_hat[(row, col)] - probe.matrix[(k, l)]).norm());
            }
        }

        let mut coherent_norm = 0.0f64;
        let mut eigenvalue = 0.0f64;
        let mut number = 0.0f64;
        let mut fock_norm = 0.0f64;
        let mut two_term = 0.0f64;
        let mut two_term_fock = 0.0f64;
        for _ in 0..trials {
            let amps = random_amplitudes(&mut rng, n_modes);
            let op = OneBodyOperator::random_hermitian(&mut rng, n_modes);
            let psi = coherent_state(&space, &amps)?;
            coherent_norm = coherent_norm.max((psi.norm() - 1.0).abs());
            eigenvalue = eigenvalue.max(coherent_eigenvalue_residual(&space, &amps, &psi));
            number = number.max((number_mean(&space, &psi) - amps.n_mean()).abs());

            let check = verify_two_term_reduction(&space, &amps, &op)?;
            two_term = two_term.max(check.residual);

            // Fixed-number counterpart: <n|O^2|n> = n(n-1)(phi'Ophi)^2 + n phi'O^2 phi.
            let n = rng.gen_range(1..=4usize);
            let fock = fock_state(&space, &amps, n)?;
            fock_norm = fock_norm.max((fock.norm() - 1.0).abs());
            let o_hat = second_quantize(&space, &op)?;
            let lhs = fock.dotc(&(&o_hat * (&o_hat * &fock))).re;
            let phi = CVector::from_column_slice(&amps.phi);
            let e1 = phi.dotc(&(&op.matrix * &phi)).re;
            let e2 = phi.dotc(&(&op.matrix * (&op.matrix * &phi))).re;
            let nf = n as f64;
            let rhs = nf * (nf - 1.0) * e1 * e1 + nf * e2;
            two_term_fock = two_term_fock.max((lhs - rhs).abs());
        }

        let ordering_trials = 10.min(trials.max(1));
        let mut ordering = 0.0f64;
        for _ in 0..ordering_trials {
            let op_i = OneBodyOperator::random_hermitian(&mut rng, n_modes);
            let op_j = OneBodyOperator::random_hermitian(&mut rng, n_modes);
            ordering = ordering.max(verify_ordering_identity(&space_ordering, &op_i, &op_j)?);
        }

        let report = OracleReport {
            seed,
            trials,
            n_modes,
            n_max_two_term: space.n_max(),
            n_max_ordering: space_ordering.n_max(),
            ccr_commutator: ResidualCheck::new(ccr, 1e-12),
            cross_mode_commutator: ResidualCheck::new(cross, 1e-15),
            coherent_norm: ResidualCheck::new(coherent_norm, 1e-10),
            coherent_eigenvalue: ResidualCheck::new(eigenvalue, 1e-10),
            number_mean: ResidualCheck::new(number, 1e-12),
            fock_norm: ResidualCheck::new(fock_norm, 1e-12),
            one_particle_sector: ResidualCheck::new(sector, 1e-14),
            ordering_identity: ResidualCheck::new(ordering, 1e-10),
            two_term_reduction: ResidualCheck::new(two_term, 1e-9),
            two_term_fock_counterpart: ResidualCheck::new(two_term_fock, 1e-10),
            all_pass: false,
        };
        let all_pass = [
            report.ccr_commutator,
            report.cross_mode_commutator,
            report.coherent_norm,
            report.coherent_eigenvalue,
            report.number_mean,
            report.fock_norm,
            report.one_particle_sector,
            report.ordering_identity,
            report.two_term_reduction,
            report.two_term_fock_counterpart,
        ]
        .iter()
        .all(|c| c.pass);
        Ok(OracleReport { all_pass, ..report })
    }
}

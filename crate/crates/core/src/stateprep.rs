//! CVO-QRAM sparse state preparation.
//!
//! One qubit (`u`, qubit 0) is flipped to `|1>` and carries the not-yet-loaded
//! weight; the remaining `n - 1` qubits form the memory register. Per stored
//! pattern, CNOTs fanning out from `u` write the pattern into the memory on
//! the `u = 1` branch, a multi-controlled transfer gate moves the pattern's
//! amplitude onto the `u = 0` branch, and the fan-out repeats to clear the
//! memory on the remaining `u = 1` branch.
//!
//! The transfer gate has a real main diagonal, so it lowers through the
//! Hadamard-conjugated half-split scheme at `16m - 40` CNOTs per `m`-qubit
//! block.
//!
//! Patterns are loaded in ascending-popcount order: a transfer gate controls
//! only on its pattern's set bits, so any already-loaded superset pattern
//! would satisfy those controls and leak amplitude. Ascending popcount makes
//! supersets load later; the prepared state itself does not depend on the
//! order.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, QubitId};
use crate::error::{Error, Result};
use crate::mcsu2::{decompose, DecompositionReport, McSu2Request, Method, MethodUsed};
use crate::sim::StateVector;
use crate::su2::{Mat2, Su2};

const NORM_TOL: f64 = 1e-9;

/// One stored pattern: a memory bitstring and its complex amplitude.
///
/// Bit `i` of the string (leftmost character first) addresses memory qubit
/// `len - 1 - i`, i.e. the string reads as the ket label of the memory
/// register.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsePattern {
    pub bits: Vec<bool>,
    pub amplitude: Complex64,
}

impl SparsePattern {
    pub fn parse(bits: &str, amplitude: Complex64) -> Result<Self> {
        let bits = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::DuplicatePattern(format!("invalid bit character {c:?} in {bits:?}"))),
            })
            .collect::<Result<Vec<bool>>>()?;
        Ok(SparsePattern { bits, amplitude })
    }

    pub fn bit_string(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn popcount(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Memory qubits (circuit indices, qubit 0 is the `u` wire) holding the
    /// set bits.
    pub fn set_qubits(&self) -> Vec<QubitId> {
        let len = self.bits.len();
        let mut qs: Vec<QubitId> = self
            .bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| 1 + (len - 1 - i))
            .collect();
        qs.sort_unstable();
        qs
    }

    /// Basis index of `|0>_u (x) |bits>` under qubit-0-least-significant order.
    pub fn basis_index(&self) -> usize {
        self.set_qubits().iter().map(|&q| 1usize << q).sum()
    }
}

/// Remaining-weight bookkeeping: `gamma_0 = 1`,
/// `gamma_k = gamma_{k-1} - |x_{k-1}|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaTracker {
    pub k: usize,
    pub gamma: f64,
}

impl GammaTracker {
    pub fn new() -> Self {
        GammaTracker { k: 0, gamma: 1.0 }
    }

    /// Consumes one amplitude, returning the `gamma_k` in effect for it.
    pub fn consume(&mut self, x: Complex64) -> Result<f64> {
        let used = self.gamma;
        let x_sq = x.norm_sqr();
        if x_sq > used + NORM_TOL {
            return Err(Error::InvalidWeight { x_sq, gamma: used });
        }
        self.k += 1;
        self.gamma = (used - x_sq).max(0.0);
        Ok(used)
    }
}

impl Default for GammaTracker {
    fn default() -> Self {
        Self::new()
    }
}

/// The amplitude-transfer gate
///
/// ```text
///   U = | sqrt((g - |x|^2)/g)    x/sqrt(g)              |
///       | -conj(x)/sqrt(g)       sqrt((g - |x|^2)/g)    |
/// ```
///
/// Special unitary with a real main diagonal for every valid `(x, gamma)`.
pub fn u_matrix(x: Complex64, gamma: f64) -> Result<Su2> {
    let x_sq = x.norm_sqr();
    if !gamma.is_finite() || gamma <= 0.0 || x_sq > gamma + NORM_TOL {
        return Err(Error::InvalidWeight { x_sq, gamma });
    }
    let diag = ((gamma - x_sq).max(0.0) / gamma).sqrt();
    let root = gamma.sqrt();
    // alpha real, beta = -conj(x)/sqrt(g): the (0,1) entry is -conj(beta) = x/sqrt(g).
    Ok(Su2::from_alpha_beta(diag.into(), -x.conj() / root))
}

/// One step of the loading schedule, in processing order.
#[derive(Debug, Clone)]
pub struct LoadStep {
    pub pattern: SparsePattern,
    pub controls: Vec<QubitId>,
    pub transfer: Su2,
    pub gamma: f64,
}

/// Validates a pattern set and lays out the loading schedule
/// (ascending-popcount order, stable within equal popcount).
pub fn loading_plan(patterns: &[SparsePattern], width: usize) -> Result<Vec<LoadStep>> {
    if width < 2 {
        return Err(Error::DimMismatch(width, 2));
    }
    let mem_len = width - 1;
    let mut seen = std::collections::HashSet::new();
    let mut total = 0.0;
    for p in patterns {
        if p.bits.len() != mem_len {
            return Err(Error::DimMismatch(p.bits.len(), mem_len));
        }
        if !seen.insert(p.bits.clone()) {
            return Err(Error::DuplicatePattern(p.bit_string()));
        }
        total += p.amplitude.norm_sqr();
    }
    if (total - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(total));
    }

    let mut order: Vec<usize> = (0..patterns.len()).collect();
    order.sort_by_key(|&i| patterns[i].popcount());
    let mut tracker = GammaTracker::new();
    let mut plan = Vec::with_capacity(patterns.len());
    for i in order {
        let p = &patterns[i];
        let gamma = tracker.consume(p.amplitude)?;
        plan.push(LoadStep {
            pattern: p.clone(),
            controls: p.set_qubits(),
            transfer: u_matrix(p.amplitude, gamma)?,
            gamma,
        });
    }
    Ok(plan)
}

/// Builds the full preparation circuit over `width` qubits and an aggregate
/// report. The report's `bound` sums each lowered block's `16m - 40` bound
/// where that formula engages (block width `m >= 6`) and the block's actual
/// count below that.
pub fn cvo_qram_circuit(
    patterns: &[SparsePattern],
    width: usize,
    method: Method,
) -> Result<(Circuit, DecompositionReport)> {
    let plan = loading_plan(patterns, width)?;
    let mut c = Circuit::new(width);
    c.push_single(0, Mat2::pauli_x())?;
    let mut bound_sum: i64 = 0;
    let mut method_used = match method {
        Method::Baseline => MethodUsed::Baseline,
        _ => MethodUsed::RealMainDiag,
    };
    for step in &plan {
        for &q in &step.controls {
            c.push_cnot(0, q)?;
        }
        let (block, rep) = decompose(&McSu2Request {
            controls: step.controls.clone(),
            target: 0,
            matrix: step.transfer,
            method,
        })?;
        method_used = rep.method_used;
        let m = step.controls.len() + 1;
        bound_sum += if m >= 6 { rep.bound } else { rep.cnot_count as i64 };
        // The block was built over its own width; replay its gates here.
        for g in block.gates() {
            c.append(g.clone())?;
        }
        for &q in &step.controls {
            c.push_cnot(0, q)?;
        }
    }
    let fused = c.fuse_single_qubit_runs();
    let report = DecompositionReport {
        cnot_count: fused.cnot_count(),
        depth: fused.depth(),
        bound: bound_sum,
        bound_formula: "sum of 16m-40 over lowered blocks (m >= 6)",
        method_used,
    };
    Ok((fused, report))
}

/// The state the preparation should produce: `|0>_u (x) sum_k x_k |p_k>`.
pub fn target_state(patterns: &[SparsePattern], width: usize) -> Result<StateVector> {
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << width];
    for p in patterns {
        if p.bits.len() != width - 1 {
            return Err(Error::DimMismatch(p.bits.len(), width - 1));
        }
        amps[p.basis_index()] = p.amplitude;
    }
    StateVector::from_amplitudes(width, amps)
}

/// Samples `2^s` distinct patterns of `width - 1` bits with i.i.d. bit
/// probability `density`, amplitudes standard complex normal then
/// normalized. Deterministic for a fixed seed.
pub fn random_double_sparse(
    width: usize,
    s: u32,
    density: f64,
    seed: u64,
) -> Result<Vec<SparsePattern>> {
    let mem_len = width.saturating_sub(1);
    let want = 1usize << s;
    if !(0.0..1.0).contains(&density) || density == 0.0 || want > (1usize << mem_len) {
        return Err(Error::InfeasibleDensity { want, density, tries: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = std::collections::HashSet::new();
    let mut bitsets = Vec::with_capacity(want);
    let max_tries = 1000 * want + 1000;
    let mut tries = 0;
    while bitsets.len() < want {
        tries += 1;
        if tries > max_tries {
            return Err(Error::InfeasibleDensity { want, density, tries });
        }
        let bits: Vec<bool> = (0..mem_len).map(|_| rng.gen_bool(density)).collect();
        if seen.insert(bits.clone()) {
            bitsets.push(bits);
        }
    }
    let mut amps: Vec<Complex64> = (0..want)
        .map(|_| {
            Complex64::new(
                crate::sample::standard_normal(&mut rng),
                crate::sample::standard_normal(&mut rng),
            )
        })
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    Ok(bitsets
        .into_iter()
        .zip(amps)
        .map(|(bits, amplitude)| SparsePattern { bits, amplitude })
        .collect())
}

/// One row of the benchmark sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub method: Method,
    pub mean_cnots: f64,
    pub std_cnots: f64,
    pub seeds: usize,
}

pub fn method_label(m: Method) -> &'static str {
    match m {
        Method::Auto => "auto",
        Method::RealOffDiag => "real-off-diag",
        Method::RealMainDiag => "real-main-diag",
        Method::General => "general",
        Method::Baseline => "baseline",
    }
}

/// Average CNOT counts of the preparation circuit per `(n, method)` over the
/// given seeds.
pub fn benchmark_sweep(
    n_range: std::ops::RangeInclusive<usize>,
    s: u32,
    density: f64,
    seeds: &[u64],
    methods: &[Method],
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for n in n_range {
        for &method in methods {
            if seeds.is_empty() {
                continue;
            }
            let mut counts = Vec::with_capacity(seeds.len());
            for &seed in seeds {
                let patterns = random_double_sparse(n, s, density, seed)?;
                let (circ, _) = cvo_qram_circuit(&patterns, n, method)?;
                counts.push(circ.cnot_count() as f64);
            }
            let mean = counts.iter().sum::<f64>() / counts.len() as f64;
            let var = counts.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / counts.len() as f64;
            rows.push(SweepRow {
                n,
                method,
                mean_cnots: mean,
                std_cnots: var.sqrt(),
                seeds: seeds.len(),
            });
        }
    }
    Ok(rows)
}

/// CSV rendering with the fixed header `n,method,mean_cnots,std_cnots,seeds`.
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("n,method,mean_cnots,std_cnots,seeds\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{:.6},{:.6},{}\n",
            r.n,
            method_label(r.method),
            r.mean_cnots,
            r.std_cnots,
            r.seeds
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::apply;

    fn fidelity(patterns: &[SparsePattern], width: usize, method: Method) -> f64 {
        let (c, _) = cvo_qram_circuit(patterns, width, method).unwrap();
        let prepared = apply(&c, &StateVector::zero_state(width)).unwrap();
        let target = target_state(patterns, width).unwrap();
        target.inner(&prepared).norm()
    }

    #[test]
    fn u_matrix_full_transfer_is_antidiagonal() {
        let x = Complex64::new(0.6, 0.0);
        let u = u_matrix(x, 0.36).unwrap();
        let m = u.mat();
        assert!(m.a00.norm() < 1e-12 && m.a11.norm() < 1e-12);
        assert!((m.a01 - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((m.a10 + Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn u_matrix_half_weight() {
        let x = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let u = u_matrix(x, 1.0).unwrap();
        let m = u.mat();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((m.a00.re - r).abs() < 1e-12 && (m.a11.re - r).abs() < 1e-12);
        assert!((m.a01.re - r).abs() < 1e-12 && (m.a10.re + r).abs() < 1e-12);
    }

    #[test]
    fn u_matrix_det_one_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let gamma: f64 = rng.gen_range(0.01..1.0);
            let frac: f64 = rng.gen_range(0.0..1.0);
            let mag = (gamma * frac).sqrt();
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            let x = Complex64::from_polar(mag, phase);
            let u = u_matrix(x, gamma).unwrap();
            assert!((u.mat().det() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            assert!(crate::su2::is_su2(u.mat(), 1e-10));
            assert!(u.mat().a00.im.abs() < 1e-15 && u.mat().a11.im.abs() < 1e-15);
        }
    }

    #[test]
    fn u_matrix_rejects_excess_weight() {
        let x = Complex64::new(0.9, 0.0);
        assert!(matches!(u_matrix(x, 0.5), Err(Error::InvalidWeight { .. })));
    }

    #[test]
    fn single_full_pattern() {
        let p = vec![SparsePattern::parse("011", Complex64::new(1.0, 0.0)).unwrap()];
        let (c, _) = cvo_qram_circuit(&p, 4, Method::Auto).unwrap();
        let out = apply(&c, &StateVector::zero_state(4)).unwrap();
        // |0>_u |011> sits at index 0b0110.
        assert!((out.amplitudes()[0b0110] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn two_pattern_bell_like() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let p = vec![
            SparsePattern::parse("001", Complex64::new(r, 0.0)).unwrap(),
            SparsePattern::parse("110", Complex64::new(r, 0.0)).unwrap(),
        ];
        assert!(fidelity(&p, 4, Method::Auto) > 1.0 - 1e-9);
    }

    #[test]
    fn all_zero_pattern_loads_uncontrolled() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let p = vec![
            SparsePattern::parse("000", Complex64::new(r, 0.0)).unwrap(),
            SparsePattern::parse("101", Complex64::new(0.0, r)).unwrap(),
        ];
        assert!(fidelity(&p, 4, Method::Auto) > 1.0 - 1e-9);
    }

    #[test]
    fn nested_patterns_prepare_exactly() {
        // The second pattern's set bits contain the first's; input order is
        // deliberately superset-first.
        let a = Complex64::new(0.8, 0.0);
        let b = Complex64::new(0.0, 0.6);
        let p = vec![
            SparsePattern::parse("1101", a).unwrap(),
            SparsePattern::parse("0100", b).unwrap(),
        ];
        for method in [Method::Auto, Method::Baseline] {
            assert!(fidelity(&p, 5, method) > 1.0 - 1e-9, "{method:?}");
        }
    }

    #[test]
    fn ancilla_disentangles() {
        let patterns = random_double_sparse(6, 3, 0.3, 42).unwrap();
        let (c, _) = cvo_qram_circuit(&patterns, 6, Method::Auto).unwrap();
        let out = apply(&c, &StateVector::zero_state(6)).unwrap();
        let leaked: f64 = out
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(i, _)| i & 1 == 1)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        assert!(leaked < 1e-18, "u-branch weight {leaked}");
    }

    #[test]
    fn method_independent_state() {
        let patterns = random_double_sparse(6, 3, 0.25, 7).unwrap();
        let (ca, _) = cvo_qram_circuit(&patterns, 6, Method::Auto).unwrap();
        let (cb, _) = cvo_qram_circuit(&patterns, 6, Method::Baseline).unwrap();
        let sa = apply(&ca, &StateVector::zero_state(6)).unwrap();
        let sb = apply(&cb, &StateVector::zero_state(6)).unwrap();
        let overlap = sa.inner(&sb).norm();
        assert!(overlap > 1.0 - 1e-9);
    }

    #[test]
    fn gamma_bookkeeping_ends_in_full_transfer() {
        let patterns = random_double_sparse(7, 3, 0.25, 11).unwrap();
        let plan = loading_plan(&patterns, 7).unwrap();
        let mut remaining = 1.0;
        for step in &plan {
            assert!((step.gamma - remaining).abs() < 1e-12);
            remaining -= step.pattern.amplitude.norm_sqr();
        }
        let last = plan.last().unwrap();
        assert!((last.gamma - last.pattern.amplitude.norm_sqr()).abs() < 1e-9);
        // Full transfer: the final gate's main diagonal vanishes.
        assert!(last.transfer.mat().a00.norm() < 1e-6);
        assert!(last.transfer.mat().a11.norm() < 1e-6);
    }

    #[test]
    fn rejects_duplicates_and_unnormalized() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let p = vec![
            SparsePattern::parse("01", Complex64::new(r, 0.0)).unwrap(),
            SparsePattern::parse("01", Complex64::new(r, 0.0)).unwrap(),
        ];
        assert!(matches!(loading_plan(&p, 3), Err(Error::DuplicatePattern(_))));

        let p = vec![SparsePattern::parse("01", Complex64::new(0.5, 0.0)).unwrap()];
        assert!(matches!(loading_plan(&p, 3), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn random_double_sparse_statistics() {
        let mut mean_pop = 0.0;
        for seed in 0..30u64 {
            let p = random_double_sparse(7, 4, 0.2, seed).unwrap();
            assert_eq!(p.len(), 16);
            let distinct: std::collections::HashSet<_> = p.iter().map(|q| q.bits.clone()).collect();
            assert_eq!(distinct.len(), 16);
            let total: f64 = p.iter().map(|q| q.amplitude.norm_sqr()).sum();
            assert!((total - 1.0).abs() < 1e-12);
            mean_pop += p.iter().map(|q| q.popcount()).sum::<usize>() as f64 / 16.0;
        }
        mean_pop /= 30.0;
        assert!((0.5..=2.5).contains(&mean_pop), "mean popcount {mean_pop}");
    }

    #[test]
    fn random_double_sparse_single_pattern() {
        let p = random_double_sparse(5, 0, 0.2, 3).unwrap();
        assert_eq!(p.len(), 1);
        assert!((p[0].amplitude.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_zero_seeds_gives_empty_table() {
        let rows = benchmark_sweep(6..=8, 2, 0.2, &[], &[Method::Auto]).unwrap();
        assert!(rows.is_empty());
        assert_eq!(sweep_to_csv(&rows), "n,method,mean_cnots,std_cnots,seeds\n");
    }

    #[test]
    fn sweep_optimized_beats_baseline() {
        let seeds: Vec<u64> = (0..3).collect();
        let rows = benchmark_sweep(6..=7, 3, 0.2, &seeds, &[Method::Auto, Method::Baseline]).unwrap();
        for pair in rows.chunks(2) {
            assert!(pair[0].mean_cnots < pair[1].mean_cnots, "{pair:?}");
        }
    }
}

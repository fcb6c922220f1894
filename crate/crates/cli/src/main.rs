//! Command-line front end for the multi-controlled SU(2) synthesis library.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error.

use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use mcsu2::circuit::Circuit;
use mcsu2::mcsu2::{
    decompose, mc_su2_baseline, mc_su2_general, mc_su2_real_off_diag, DecompositionReport,
    McSu2Request, Method,
};
use mcsu2::sample::{random_off_diag, random_su2};
use mcsu2::sim::{
    apply, circuit_unitary_with_limit, equiv_phase, ideal_mc_unitary, StateVector, W_MAX_DENSE,
};
use mcsu2::stateprep::{
    benchmark_sweep, cvo_qram_circuit, sweep_to_csv, target_state, SparsePattern,
};
use mcsu2::su2::{Mat2, Su2};

#[derive(Parser)]
#[command(name = "mcsu2", about = "Linear-CNOT synthesis of multi-controlled SU(2) gates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lower a multi-controlled gate and report CNOT count, depth and bound.
    Decompose(DecomposeArgs),
    /// Check decompositions against brute-force ideal unitaries per width.
    Verify(VerifyArgs),
    /// Emit CSV count tables (gate decomposition or state-preparation mode).
    Bench(BenchArgs),
    /// Lower a multi-controlled gate and print OpenQASM 2.0.
    Qasm(QasmArgs),
    /// Prepare a sparse state from an amplitude file; writes QASM and a
    /// fidelity report.
    Prepare(PrepareArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GateKind {
    Rx,
    Ry,
    Rz,
    Su2,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Auto,
    RealOffDiag,
    RealMainDiag,
    General,
    Baseline,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Auto => Method::Auto,
            MethodArg::RealOffDiag => Method::RealOffDiag,
            MethodArg::RealMainDiag => Method::RealMainDiag,
            MethodArg::General => Method::General,
            MethodArg::Baseline => Method::Baseline,
        }
    }
}

#[derive(Args, Clone)]
struct GateSpec {
    /// Gate family.
    #[arg(long, value_enum)]
    gate: GateKind,
    /// Rotation angle in radians (rx/ry/rz).
    #[arg(long, allow_negative_numbers = true)]
    angle: Option<f64>,
    /// Eight reals for an explicit matrix: re im re im re im re im, row major.
    #[arg(long, num_args = 8, allow_negative_numbers = true)]
    entries: Option<Vec<f64>>,
}

impl GateSpec {
    fn matrix(&self) -> Result<Su2, String> {
        match self.gate {
            GateKind::Rx | GateKind::Ry | GateKind::Rz => {
                let angle = self.angle.ok_or("--angle is required for rotation gates")?;
                if !angle.is_finite() {
                    return Err("--angle must be finite".into());
                }
                Ok(match self.gate {
                    GateKind::Rx => Su2::rx(angle),
                    GateKind::Ry => Su2::ry(angle),
                    GateKind::Rz => Su2::rz(angle),
                    GateKind::Su2 => unreachable!(),
                })
            }
            GateKind::Su2 => {
                let e = self
                    .entries
                    .as_ref()
                    .ok_or("--entries is required for --gate su2")?;
                let m = Mat2::new(
                    Complex64::new(e[0], e[1]),
                    Complex64::new(e[2], e[3]),
                    Complex64::new(e[4], e[5]),
                    Complex64::new(e[6], e[7]),
                );
                Su2::new(m, 1e-8).map_err(|err| err.to_string())
            }
        }
    }
}

#[derive(Args)]
struct DecomposeArgs {
    #[command(flatten)]
    gate: GateSpec,
    /// Number of control qubits.
    #[arg(long)]
    controls: usize,
    #[arg(long, value_enum, default_value = "auto")]
    method: MethodArg,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    gate: GateSpec,
    /// Largest width (controls + target) to check.
    #[arg(long, default_value_t = 8)]
    max_width: usize,
    #[arg(long, value_enum, default_value = "auto")]
    method: MethodArg,
    /// Residual threshold per width.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Corrupt each netlist before checking (negative-control hook).
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BenchMode {
    Mcsu2,
    Cvoqram,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    mode: BenchMode,
    #[arg(long, default_value_t = 8)]
    n_min: usize,
    #[arg(long, default_value_t = 14)]
    n_max: usize,
    /// log2 of the number of nonzero amplitudes (cvoqram mode).
    #[arg(long, default_value_t = 4)]
    s: u32,
    /// Average density of ones in the sampled bitstrings (cvoqram mode).
    #[arg(long, default_value_t = 0.2)]
    density: f64,
    /// Number of random instances per point.
    #[arg(long, default_value_t = 30)]
    seeds: u64,
    /// Base seed; instance seeds count up from it.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: std::path::PathBuf,
}

#[derive(Args)]
struct QasmArgs {
    #[command(flatten)]
    gate: GateSpec,
    #[arg(long)]
    controls: usize,
    #[arg(long, value_enum, default_value = "auto")]
    method: MethodArg,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct PrepareArgs {
    /// Amplitude file: one `bitstring,re,im` per line, `#` comments allowed.
    #[arg(long)]
    file: std::path::PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    method: MethodArg,
    /// Rescale amplitudes to unit norm instead of rejecting the input.
    #[arg(long)]
    normalize: bool,
    /// Write the circuit QASM to a file instead of stdout.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Decompose(a) => cmd_decompose(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Qasm(a) => cmd_qasm(a),
        Command::Prepare(a) => cmd_prepare(a),
    }
}

fn fail_usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn print_report(r: &DecompositionReport) {
    println!("method: {}", r.method_used);
    println!("cnots: {}", r.cnot_count);
    println!("depth: {}", r.depth);
    println!("bound: {} ({})", r.bound, r.bound_formula);
}

fn build(
    gate: &GateSpec,
    controls: usize,
    method: MethodArg,
) -> Result<(Circuit, DecompositionReport), String> {
    let matrix = gate.matrix()?;
    let req = McSu2Request {
        controls: (0..controls).collect(),
        target: controls,
        matrix,
        method: method.into(),
    };
    decompose(&req).map_err(|e| e.to_string())
}

fn cmd_decompose(a: DecomposeArgs) -> ExitCode {
    match build(&a.gate, a.controls, a.method) {
        Ok((_, report)) => {
            print_report(&report);
            ExitCode::SUCCESS
        }
        Err(e) => fail_usage(e),
    }
}

fn cmd_verify(a: VerifyArgs) -> ExitCode {
    if a.max_width > W_MAX_DENSE {
        return fail_usage(format!(
            "width {} exceeds the dense-unitary limit {W_MAX_DENSE}",
            a.max_width
        ));
    }
    let matrix = match a.gate.matrix() {
        Ok(m) => m,
        Err(e) => return fail_usage(e),
    };
    let mut all_ok = true;
    for width in 3..=a.max_width {
        let controls: Vec<usize> = (0..width - 1).collect();
        let req = McSu2Request {
            controls: controls.clone(),
            target: width - 1,
            matrix,
            method: a.method.into(),
        };
        let (mut circuit, _) = match decompose(&req) {
            Ok(x) => x,
            Err(e) => return fail_usage(e),
        };
        if a.inject_fault {
            if let Err(e) = circuit.push_single(width - 1, Mat2::pauli_x()) {
                return fail_usage(e);
            }
        }
        let got = match circuit_unitary_with_limit(&circuit, W_MAX_DENSE) {
            Ok(u) => u,
            Err(e) => return fail_usage(e),
        };
        let ideal = match ideal_mc_unitary(width, &controls, width - 1, matrix.mat()) {
            Ok(u) => u,
            Err(e) => return fail_usage(e),
        };
        let (ok, err, _) = match equiv_phase(&got, &ideal, a.tol) {
            Ok(x) => x,
            Err(e) => return fail_usage(e),
        };
        println!(
            "width {width}: residual {err:.3e} [{}]",
            if ok { "ok" } else { "FAIL" }
        );
        all_ok &= ok;
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_bench(a: BenchArgs) -> ExitCode {
    let csv = match a.mode {
        BenchMode::Mcsu2 => bench_mcsu2_csv(a.n_min, a.n_max, a.seed),
        BenchMode::Cvoqram => {
            let seeds: Vec<u64> = (a.seed..a.seed + a.seeds).collect();
            match benchmark_sweep(
                a.n_min..=a.n_max,
                a.s,
                a.density,
                &seeds,
                &[Method::Auto, Method::Baseline],
            ) {
                Ok(rows) => sweep_to_csv(&rows),
                Err(e) => return fail_usage(e),
            }
        }
    };
    if let Err(e) = std::fs::write(&a.out, csv) {
        return fail_usage(format!("cannot write {}: {e}", a.out.display()));
    }
    ExitCode::SUCCESS
}

fn bench_mcsu2_csv(n_min: usize, n_max: usize, seed: u64) -> String {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::from(
        "n,real_off_diag_cnots,real_off_diag_bound,general_cnots,general_bound,baseline_cnots,baseline_bound\n",
    );
    for n in n_min..=n_max {
        if n < 3 {
            continue;
        }
        let k = n - 1;
        let controls: Vec<usize> = (0..k).collect();
        let form = random_off_diag(&mut rng);
        let matrix = random_su2(&mut rng);
        let off = mc_su2_real_off_diag(&controls, k, &form);
        let gen = mc_su2_general(&controls, k, &matrix);
        let base = mc_su2_baseline(&controls, k, &matrix);
        if let (Ok((_, r1)), Ok((_, r2)), Ok((_, r3))) = (off, gen, base) {
            out.push_str(&format!(
                "{n},{},{},{},{},{},{}\n",
                r1.cnot_count, r1.bound, r2.cnot_count, r2.bound, r3.cnot_count, r3.bound
            ));
        }
    }
    out
}

fn cmd_qasm(a: QasmArgs) -> ExitCode {
    match build(&a.gate, a.controls, a.method) {
        Ok((circuit, _)) => {
            let text = circuit.to_qasm();
            match a.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, text) {
                        return fail_usage(format!("cannot write {}: {e}", path.display()));
                    }
                }
                None => {
                    let _ = std::io::stdout().write_all(text.as_bytes());
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail_usage(e),
    }
}

fn parse_amplitude_file(text: &str) -> Result<Vec<SparsePattern>, String> {
    let mut patterns = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |what: &str| format!("line {}: {what}: {raw:?}", idx + 1);
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(err("expected `bitstring,re,im`"));
        }
        let re: f64 = parts[1].parse().map_err(|_| err("bad real part"))?;
        let im: f64 = parts[2].parse().map_err(|_| err("bad imaginary part"))?;
        let p = SparsePattern::parse(parts[0], Complex64::new(re, im))
            .map_err(|e| err(&e.to_string()))?;
        patterns.push(p);
    }
    if patterns.is_empty() {
        return Err("no patterns in file".into());
    }
    Ok(patterns)
}

fn cmd_prepare(a: PrepareArgs) -> ExitCode {
    let text = match std::fs::read_to_string(&a.file) {
        Ok(t) => t,
        Err(e) => return fail_usage(format!("cannot read {}: {e}", a.file.display())),
    };
    let mut patterns = match parse_amplitude_file(&text) {
        Ok(p) => p,
        Err(e) => return fail_usage(e),
    };
    let total: f64 = patterns.iter().map(|p| p.amplitude.norm_sqr()).sum();
    if (total - 1.0).abs() > 1e-9 {
        if a.normalize {
            eprintln!("warning: rescaling amplitudes (sum of squares was {total:.6})");
            let norm = total.sqrt();
            for p in &mut patterns {
                p.amplitude /= norm;
            }
        } else {
            return fail_usage(format!(
                "amplitudes not normalized (sum of squares {total:.6}); pass --normalize to rescale"
            ));
        }
    }
    let width = patterns[0].bits.len() + 1;
    let (circuit, report) = match cvo_qram_circuit(&patterns, width, a.method.into()) {
        Ok(x) => x,
        Err(e) => return fail_usage(e),
    };
    let qasm = circuit.to_qasm();
    if let Some(path) = &a.out {
        if let Err(e) = std::fs::write(path, &qasm) {
            return fail_usage(format!("cannot write {}: {e}", path.display()));
        }
    } else {
        let _ = std::io::stdout().write_all(qasm.as_bytes());
    }
    // Fidelity against the requested state, when the register is small
    // enough to simulate.
    if width <= 20 {
        let prepared = match apply(&circuit, &StateVector::zero_state(width)) {
            Ok(s) => s,
            Err(e) => return fail_usage(e),
        };
        let target = match target_state(&patterns, width) {
            Ok(s) => s,
            Err(e) => return fail_usage(e),
        };
        let fidelity = target.inner(&prepared).norm();
        println!("patterns: {}", patterns.len());
        println!("width: {width}");
        println!("cnots: {}", report.cnot_count);
        println!("depth: {}", report.depth);
        println!("fidelity: {fidelity:.12}");
        if fidelity < 1.0 - 1e-9 {
            return ExitCode::from(1);
        }
    } else {
        println!("width {width} too large for the fidelity check; circuit written");
    }
    ExitCode::SUCCESS
}

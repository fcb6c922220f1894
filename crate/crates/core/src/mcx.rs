//! Multi-controlled-X building blocks: exact and approximate Toffoli gates,
//! dirty-ancilla Toffoli chains with action-only / reset-only halves, and the
//! split construction that needs a single borrowed qubit.
//!
//! The chain schedules approximate Toffoli gates so their diagonal phase
//! errors cancel pairwise; where a pair encloses gates that avoid the pair's
//! free control and target wires, each gate is emitted as a two-CNOT half
//! (the enclosed gates commute with the elided tail, so the product is
//! unchanged gate for gate).

use crate::circuit::{Circuit, Gate, QubitId};
use crate::error::{Error, Result};
use crate::su2::Mat2;

/// Which part of the dirty-ancilla chain to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Flip-target section followed by the ancilla-reverting section.
    Full,
    /// Only the flip-target section; the caller guarantees a mirror partner.
    ActionOnly,
    /// Only the ancilla-reverting section.
    ResetOnly,
}

/// Where approximate Toffoli gates may replace exact ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApproxPolicy {
    /// Every Toffoli is the 6-CNOT exact netlist.
    ExactToffolisOnly,
    /// Ancilla-targeting Toffolis are approximated (their phases cancel in
    /// pairs inside the chain); target-touching Toffolis stay exact.
    ApproxWhereCancelled,
    /// Additionally approximates the target-touching Toffolis, producing a
    /// relative-phase multi-controlled X; the caller guarantees the phases
    /// cancel against a partner circuit.
    ApproxEverywhereAllowed,
}

/// Orientation of the approximate Toffoli netlist.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Forward,
    Reverse,
}

/// Request for [`mcx_dirty_chain`].
#[derive(Debug, Clone)]
pub struct McxRequest {
    pub controls: Vec<QubitId>,
    pub target: QubitId,
    pub dirty_ancillas: Vec<QubitId>,
    pub mode: Mode,
    pub approx_policy: ApproxPolicy,
}

fn check_distinct<'a>(qubits: impl IntoIterator<Item = &'a QubitId>) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for &q in qubits {
        if !seen.insert(q) {
            return Err(Error::DuplicateQubit(q));
        }
    }
    Ok(())
}

fn width_of<'a>(qubits: impl IntoIterator<Item = &'a QubitId>) -> usize {
    qubits.into_iter().copied().max().map_or(0, |m| m + 1)
}

fn ry_quarter() -> Mat2 {
    Mat2::ry(std::f64::consts::FRAC_PI_4)
}

fn ry_quarter_dg() -> Mat2 {
    Mat2::ry(-std::f64::consts::FRAC_PI_4)
}

/// Appends the qelib1 exact Toffoli netlist: 6 CNOTs.
pub(crate) fn emit_toffoli(c: &mut Circuit, c1: QubitId, c2: QubitId, t: QubitId) -> Result<()> {
    let h = Mat2::hadamard();
    let tg = Mat2::t_gate();
    let td = Mat2::t_dagger();
    c.push_single(t, h)?;
    c.push_cnot(c2, t)?;
    c.push_single(t, td)?;
    c.push_cnot(c1, t)?;
    c.push_single(t, tg)?;
    c.push_cnot(c2, t)?;
    c.push_single(t, td)?;
    c.push_cnot(c1, t)?;
    c.push_single(c2, tg)?;
    c.push_single(t, tg)?;
    c.push_single(t, h)?;
    c.push_cnot(c1, c2)?;
    c.push_single(c1, tg)?;
    c.push_single(c2, td)?;
    c.push_cnot(c1, c2)?;
    Ok(())
}

/// Appends the 3-CNOT approximate Toffoli. Equal to `Delta * CCX` where the
/// diagonal `Delta` flips exactly the `c1 = 0, c2 = 1, t = 0` basis state.
pub(crate) fn emit_approx_toffoli(
    c: &mut Circuit,
    c1: QubitId,
    c2: QubitId,
    t: QubitId,
    orientation: Orientation,
) -> Result<()> {
    let gates: [Gate; 7] = [
        Gate::single(t, ry_quarter_dg()),
        Gate::cnot(c1, t),
        Gate::single(t, ry_quarter_dg()),
        Gate::cnot(c2, t),
        Gate::single(t, ry_quarter()),
        Gate::cnot(c1, t),
        Gate::single(t, ry_quarter()),
    ];
    match orientation {
        Orientation::Forward => {
            for g in gates {
                c.append(g)?;
            }
        }
        Orientation::Reverse => {
            for g in gates.iter().rev() {
                c.append(g.dagger())?;
            }
        }
    }
    Ok(())
}

/// First four gates of the approximate Toffoli (2 CNOTs); used for the
/// earlier gate of a cancelling pair.
fn emit_approx_front(c: &mut Circuit, c1: QubitId, c2: QubitId, t: QubitId) -> Result<()> {
    c.push_single(t, ry_quarter_dg())?;
    c.push_cnot(c1, t)?;
    c.push_single(t, ry_quarter_dg())?;
    c.push_cnot(c2, t)?;
    Ok(())
}

/// Last four gates of the approximate Toffoli (2 CNOTs); used for the later
/// gate of a cancelling pair.
fn emit_approx_back(c: &mut Circuit, c1: QubitId, c2: QubitId, t: QubitId) -> Result<()> {
    c.push_cnot(c2, t)?;
    c.push_single(t, ry_quarter())?;
    c.push_cnot(c1, t)?;
    c.push_single(t, ry_quarter())?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    /// Standalone gate: exact or full approximate netlist.
    Whole,
    /// Earlier member of a cancelling pair.
    FrontHalf,
    /// Later member of a cancelling pair.
    BackHalf,
}

fn emit_level(
    c: &mut Circuit,
    c1: QubitId,
    c2: QubitId,
    t: QubitId,
    approx: bool,
    slot: Slot,
) -> Result<()> {
    if !approx {
        return emit_toffoli(c, c1, c2, t);
    }
    match slot {
        Slot::Whole => emit_approx_toffoli(c, c1, c2, t, Orientation::Forward),
        Slot::FrontHalf => emit_approx_front(c, c1, c2, t),
        Slot::BackHalf => emit_approx_back(c, c1, c2, t),
    }
}

/// The chain's gate positions for `k >= 3` controls and `k - 2` ancillas.
///
/// End gates touch the target: `(c[k-1], a[k-3]) -> t`. Inner level `j`
/// (from `k-1` down to `3`, one-based) is `(c[j-1], a[j-3]) -> a[j-2]`, and
/// the middle gate is `(c[0], c[1]) -> a[0]`.
struct ChainLayout<'a> {
    controls: &'a [QubitId],
    ancillas: &'a [QubitId],
    target: QubitId,
}

impl ChainLayout<'_> {
    fn k(&self) -> usize {
        self.controls.len()
    }

    fn end(&self) -> (QubitId, QubitId, QubitId) {
        let k = self.k();
        (self.controls[k - 1], self.ancillas[k - 3], self.target)
    }

    fn level(&self, j: usize) -> (QubitId, QubitId, QubitId) {
        (self.controls[j - 1], self.ancillas[j - 3], self.ancillas[j - 2])
    }

    fn middle(&self) -> (QubitId, QubitId, QubitId) {
        (self.controls[0], self.controls[1], self.ancillas[0])
    }
}

/// Flip-target section: ends touch the target, inner levels run down to the
/// middle and back up.
fn emit_flip(c: &mut Circuit, lay: &ChainLayout, policy: ApproxPolicy) -> Result<()> {
    let k = lay.k();
    let approx_inner = policy != ApproxPolicy::ExactToffolisOnly;
    let approx_ends = policy == ApproxPolicy::ApproxEverywhereAllowed;
    let end_slot = |s| if approx_ends { s } else { Slot::Whole };

    let (e1, e2, et) = lay.end();
    emit_level(c, e1, e2, et, approx_ends, end_slot(Slot::FrontHalf))?;
    for j in (3..=k - 1).rev() {
        let (c1, c2, t) = lay.level(j);
        emit_level(c, c1, c2, t, approx_inner, Slot::FrontHalf)?;
    }
    let (m1, m2, mt) = lay.middle();
    emit_level(c, m1, m2, mt, approx_inner, Slot::Whole)?;
    for j in 3..=k - 1 {
        let (c1, c2, t) = lay.level(j);
        emit_level(c, c1, c2, t, approx_inner, Slot::BackHalf)?;
    }
    emit_level(c, e1, e2, et, approx_ends, end_slot(Slot::BackHalf))?;
    Ok(())
}

/// Ancilla-reverting section: the flip section without the end gates.
fn emit_revert(c: &mut Circuit, lay: &ChainLayout, policy: ApproxPolicy) -> Result<()> {
    let k = lay.k();
    let approx_inner = policy != ApproxPolicy::ExactToffolisOnly;
    for j in (3..=k - 1).rev() {
        let (c1, c2, t) = lay.level(j);
        emit_level(c, c1, c2, t, approx_inner, Slot::FrontHalf)?;
    }
    let (m1, m2, mt) = lay.middle();
    emit_level(c, m1, m2, mt, approx_inner, Slot::Whole)?;
    for j in 3..=k - 1 {
        let (c1, c2, t) = lay.level(j);
        emit_level(c, c1, c2, t, approx_inner, Slot::BackHalf)?;
    }
    Ok(())
}

pub(crate) fn emit_dirty_chain(
    c: &mut Circuit,
    controls: &[QubitId],
    target: QubitId,
    ancillas: &[QubitId],
    mode: Mode,
    policy: ApproxPolicy,
) -> Result<()> {
    let k = controls.len();
    if k <= 2 {
        // Degenerate chain: the action is the whole gate, there is nothing
        // to revert.
        if mode != Mode::ResetOnly {
            emit_small(c, controls, target)?;
        }
        return Ok(());
    }
    if ancillas.len() < k - 2 {
        return Err(Error::NotEnoughAncillas { needed: k - 2, available: ancillas.len() });
    }
    let lay = ChainLayout { controls, ancillas: &ancillas[..k - 2], target };
    match mode {
        Mode::Full => {
            emit_flip(c, &lay, policy)?;
            emit_revert(c, &lay, policy)
        }
        Mode::ActionOnly => emit_flip(c, &lay, policy),
        Mode::ResetOnly => emit_revert(c, &lay, policy),
    }
}

pub(crate) fn emit_small(c: &mut Circuit, controls: &[QubitId], target: QubitId) -> Result<()> {
    match controls {
        [] => c.push_single(target, Mat2::pauli_x()),
        [c0] => c.push_cnot(*c0, target),
        [c0, c1] => emit_toffoli(c, *c0, *c1, target),
        _ => unreachable!("emit_small called with more than two controls"),
    }
}

/// Exact Toffoli on distinct qubits; 6 CNOTs.
pub fn toffoli(c1: QubitId, c2: QubitId, t: QubitId) -> Result<Circuit> {
    check_distinct([&c1, &c2, &t])?;
    let mut c = Circuit::new(width_of([&c1, &c2, &t]));
    emit_toffoli(&mut c, c1, c2, t)?;
    Ok(c)
}

/// Approximate (relative-phase) Toffoli; 3 CNOTs, equal to the exact gate up
/// to a diagonal that flips the `c1 = 0, c2 = 1, t = 0` state.
pub fn approx_toffoli(
    c1: QubitId,
    c2: QubitId,
    t: QubitId,
    orientation: Orientation,
) -> Result<Circuit> {
    check_distinct([&c1, &c2, &t])?;
    let mut c = Circuit::new(width_of([&c1, &c2, &t]));
    emit_approx_toffoli(&mut c, c1, c2, t, orientation)?;
    Ok(c)
}

/// Multi-controlled X over `k >= 3` controls with `k - 2` dirty ancillas.
/// Costs at most `8k - 6` CNOTs under `ApproxWhereCancelled`.
pub fn mcx_dirty_chain(req: &McxRequest) -> Result<Circuit> {
    let k = req.controls.len();
    check_distinct(
        req.controls
            .iter()
            .chain(std::iter::once(&req.target))
            .chain(req.dirty_ancillas.iter().take(k.saturating_sub(2))),
    )?;
    let used = if k >= 3 { &req.dirty_ancillas[..(k - 2).min(req.dirty_ancillas.len())] } else { &[][..] };
    let mut c = Circuit::new(width_of(
        req.controls.iter().chain(std::iter::once(&req.target)).chain(used.iter()),
    ));
    emit_dirty_chain(&mut c, &req.controls, req.target, &req.dirty_ancillas, req.mode, req.approx_policy)?;
    Ok(c)
}

/// Control-register split used when only one borrowed qubit is available:
/// `m2 = ceil(n/2)` control slots in the bottom gate (including the borrowed
/// qubit) and `m1 = n - m2 - 1` in the top gate, for an `n`-qubit system.
pub(crate) fn one_dirty_split(k: usize) -> (usize, usize) {
    let n = k + 2;
    let m2 = n.div_ceil(2);
    let m1 = n - m2 - 1;
    (m1, m2)
}

pub(crate) struct OneDirtyEmit {
    /// Emit only the flip-target half of the trailing bottom gate.
    pub trailing_action_only: bool,
    /// Emit the mirrored gate order (bottom-gate flip first).
    pub mirrored: bool,
}

/// Emits the four-gate sequence `T1 T2 T1 T2` (`T1`: top controls onto the
/// borrowed qubit, `T2`: bottom controls plus borrowed qubit onto the
/// target). With `mirrored`, the order is `T2 T1 T2 T1` so a following
/// circuit can mirror a preceding one.
pub(crate) fn emit_one_dirty(
    c: &mut Circuit,
    controls: &[QubitId],
    target: QubitId,
    dirty: QubitId,
    policy: ApproxPolicy,
    emit: OneDirtyEmit,
) -> Result<()> {
    let k = controls.len();
    if k <= 2 {
        return emit_small(c, controls, target);
    }
    if k == 3 {
        // One ancilla is exactly what the chain needs. The borrowed qubit is
        // the chain's own ancilla here, so the reverting section can never be
        // elided: a neighbour controlled by that qubit would read junk.
        let anc = [dirty];
        let lay = ChainLayout { controls, ancillas: &anc, target };
        emit_flip(c, &lay, policy)?;
        emit_revert(c, &lay, policy)?;
        return Ok(());
    }

    let mut sorted: Vec<QubitId> = controls.to_vec();
    sorted.sort_unstable();
    let (m1, _m2) = one_dirty_split(k);
    let (g1, g2) = sorted.split_at(m1);

    // Top gate: G1 onto the borrowed qubit, ancillas borrowed from G2 + target.
    let mut pool1: Vec<QubitId> = g2.to_vec();
    pool1.push(target);
    pool1.sort_unstable();
    // Bottom gate: G2 + borrowed qubit onto the target, ancillas from G1.
    let mut bottom: Vec<QubitId> = g2.to_vec();
    bottom.push(dirty);

    // The top gate's own target is reset by its pair, so every Toffoli in it
    // may be approximated.
    let top_policy = match policy {
        ApproxPolicy::ExactToffolisOnly => ApproxPolicy::ExactToffolisOnly,
        _ => ApproxPolicy::ApproxEverywhereAllowed,
    };

    let t1 = |c: &mut Circuit| emit_dirty_chain(c, g1, dirty, &pool1, Mode::Full, top_policy);
    let t2 = |c: &mut Circuit, mode: Mode| emit_dirty_chain(c, &bottom, target, g1, mode, policy);

    let trailing_mode = if emit.trailing_action_only { Mode::ActionOnly } else { Mode::Full };
    if emit.mirrored {
        t2(c, trailing_mode)?;
        t1(c)?;
        t2(c, Mode::Full)?;
        t1(c)?;
    } else {
        t1(c)?;
        t2(c, Mode::Full)?;
        t1(c)?;
        t2(c, trailing_mode)?;
    }
    Ok(())
}

/// Multi-controlled X with `k >= 3` controls and a single borrowed qubit in
/// an unknown state. Costs at most `16n - 40` CNOTs for `n = k + 2`.
pub fn mcx_one_dirty(
    controls: &[QubitId],
    target: QubitId,
    dirty: QubitId,
    policy: ApproxPolicy,
) -> Result<Circuit> {
    check_distinct(controls.iter().chain([&target, &dirty]))?;
    let mut c = Circuit::new(width_of(controls.iter().chain([&target, &dirty])));
    emit_one_dirty(
        &mut c,
        controls,
        target,
        dirty,
        policy,
        OneDirtyEmit { trailing_action_only: false, mirrored: false },
    )?;
    Ok(c)
}

/// Fallbacks for up to two controls: X, CNOT, Toffoli.
pub fn mcx_small(controls: &[QubitId], target: QubitId) -> Result<Circuit> {
    if controls.len() > 2 {
        return Err(Error::NotEnoughAncillas { needed: controls.len() - 2, available: 0 });
    }
    check_distinct(controls.iter().chain(std::iter::once(&target)))?;
    let mut c = Circuit::new(width_of(controls.iter().chain(std::iter::once(&target))));
    emit_small(&mut c, controls, target)?;
    Ok(c)
}

/// Ancilla-free exact multi-controlled X via recursive square roots. The
/// CNOT count grows exponentially with `k`; this exists as the opt-in
/// fallback when no borrowed qubit is available at all.
pub fn mcx_exact_recursive(controls: &[QubitId], target: QubitId) -> Result<Circuit> {
    check_distinct(controls.iter().chain(std::iter::once(&target)))?;
    let mut c = Circuit::new(width_of(controls.iter().chain(std::iter::once(&target))));
    emit_mc_unitary_recursive(&mut c, controls, target, &Mat2::pauli_x())?;
    Ok(c)
}

/// Recursive multi-controlled U(2): `Lambda_k(U) = Lambda_1(V) Lambda_{k-1}(X)
/// Lambda_1(V†) Lambda_{k-1}(X) Lambda_{k-1}(V)` with `V^2 = U`.
fn emit_mc_unitary_recursive(
    c: &mut Circuit,
    controls: &[QubitId],
    target: QubitId,
    u: &Mat2,
) -> Result<()> {
    match controls {
        [] => c.push_single(target, *u),
        [c0] => emit_controlled_unitary(c, *c0, target, u),
        _ => {
            let (rest, last) = controls.split_at(controls.len() - 1);
            let v = sqrt_unitary(u);
            emit_controlled_unitary(c, last[0], target, &v)?;
            emit_mc_unitary_recursive(c, rest, last[0], &Mat2::pauli_x())?;
            emit_controlled_unitary(c, last[0], target, &v.adjoint())?;
            emit_mc_unitary_recursive(c, rest, last[0], &Mat2::pauli_x())?;
            emit_mc_unitary_recursive(c, rest, target, &v)
        }
    }
}

/// Principal square root of a 2x2 unitary via its spectral decomposition.
fn sqrt_unitary(u: &Mat2) -> Mat2 {
    // Scale into SU(2), take the SU(2) square root, restore half the phase.
    let det = u.det();
    let phase = det.arg() / 2.0;
    let s = u.scale(num_complex::Complex64::from_polar(1.0, -phase));
    let su = crate::su2::Su2::new(s, 1e-9).expect("input must be unitary");
    let half = match crate::su2::eigendecompose(&su) {
        Ok(e) => {
            let d_half = Mat2::new(
                num_complex::Complex64::from_polar(1.0, e.d_phase / 2.0),
                crate::su2::ZERO,
                crate::su2::ZERO,
                num_complex::Complex64::from_polar(1.0, -e.d_phase / 2.0),
            );
            e.q.mat().mul(&d_half).mul(&e.q.mat().adjoint())
        }
        // +-I: the identity square-roots to itself, -I to diag(i, -i).
        Err(_) => {
            if (su.mat().a00 - crate::su2::ONE).norm() < 1e-6 {
                *su.mat()
            } else {
                Mat2::new(crate::su2::I, crate::su2::ZERO, crate::su2::ZERO, -crate::su2::I)
            }
        }
    };
    half.scale(num_complex::Complex64::from_polar(1.0, phase / 2.0))
}

/// Controlled-U(2) with two CNOTs: a phase on the control absorbs the
/// determinant, the special-unitary rest lowers through its ABC split.
pub(crate) fn emit_controlled_unitary(
    c: &mut Circuit,
    control: QubitId,
    target: QubitId,
    u: &Mat2,
) -> Result<()> {
    let det = u.det();
    let phase = det.arg() / 2.0;
    let su = crate::su2::Su2::new(
        u.scale(num_complex::Complex64::from_polar(1.0, -phase)),
        1e-8,
    )
    .expect("controlled gate must be unitary");
    if phase.abs() > 1e-15 {
        // diag(1, e^{i phase}) on the control wire.
        c.push_single(
            control,
            Mat2::new(
                crate::su2::ONE,
                crate::su2::ZERO,
                crate::su2::ZERO,
                num_complex::Complex64::from_polar(1.0, phase),
            ),
        )?;
    }
    emit_controlled_su2(c, control, target, &su)
}

/// Controlled SU(2) via `w = a X b X c` with `a b c = I`; two CNOTs. When the
/// off-diagonal of `w` is real the two-gate form (`c = I`) is used.
pub(crate) fn emit_controlled_su2(
    c: &mut Circuit,
    control: QubitId,
    target: QubitId,
    w: &crate::su2::Su2,
) -> Result<()> {
    if w.mat().max_dev(&Mat2::identity()) < 1e-15 {
        return Ok(());
    }
    let (a, b, cc) = match crate::su2::classify_diagonal(w, 1e-14) {
        // Real off-diagonal: w = Rz(beta) Ry(theta) Rz(beta) = a X a† X with
        // a = Rz(beta) Ry(theta/2), saving the third gate.
        crate::su2::DiagonalClass::RealOffDiag | crate::su2::DiagonalClass::Both => {
            let m = w.mat();
            let half_theta = m.a10.re.atan2(m.a11.norm());
            let beta = if m.a11.norm() > 1e-12 { m.a11.arg() } else { 0.0 };
            let a = crate::su2::Su2::new(Mat2::rz(beta).mul(&Mat2::ry(half_theta)), 1e-9)
                .expect("rotation product is special unitary");
            (a, a.adjoint(), crate::su2::Su2::identity())
        }
        _ => crate::su2::abc_decompose(w),
    };
    if cc.mat().max_dev(&Mat2::identity()) > 1e-15 {
        c.push_single(target, *cc.mat())?;
    }
    c.push_cnot(control, target)?;
    c.push_single(target, *b.mat())?;
    c.push_cnot(control, target)?;
    c.push_single(target, *a.mat())?;
    Ok(())
}

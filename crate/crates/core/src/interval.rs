//! One-dimensional translation dynamics `x' = x + u` on an interval domain,
//! abstracted over a cover of interval cells with exact endpoint flags.
//!
//! Abstract inputs are affine local controllers `u = K·x + l`, so the closed
//! loop on a cell is `x ↦ (1 + K)·x + l` and the concrete interface is the
//! closed form `I(x1, q, κ) = {κ(x1)}`. The continuous system itself is
//! never enumerated.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relations::{check_asr, check_frr, check_mcr, Relation};
use crate::scalar::Scalar;
use crate::synthesis::{synthesize_reach_avoid, Synthesis, SynthesisResult};
use crate::system::{
    states, FiniteTransitionSystem, Input, InputSet, ReachAvoidSpec, State, StateSet,
};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalCell<T> {
    lo: T,
    hi: T,
    lo_closed: bool,
    hi_closed: bool,
}

impl<T: Scalar> IntervalCell<T> {
    pub fn new(lo: T, hi: T, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidInterval(format!("lower bound {lo} exceeds upper bound {hi}")));
        }
        if lo == hi && !(lo_closed && hi_closed) {
            return Err(Error::InvalidInterval(format!("degenerate cell at {lo} must be closed")));
        }
        Ok(IntervalCell {
            lo,
            hi,
            lo_closed,
            hi_closed,
        })
    }

    pub fn closed(lo: T, hi: T) -> Result<Self> {
        Self::new(lo, hi, true, true)
    }

    pub fn point(v: T) -> Self {
        IntervalCell {
            lo: v.clone(),
            hi: v,
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn lo(&self) -> &T {
        &self.lo
    }

    pub fn hi(&self) -> &T {
        &self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &T) -> bool {
        let above = if self.lo_closed { *x >= self.lo } else { *x > self.lo };
        let below = if self.hi_closed { *x <= self.hi } else { *x < self.hi };
        above && below
    }

    /// The closure `[lo, hi]` contains `x`.
    pub fn closure_contains(&self, x: &T) -> bool {
        *x >= self.lo && *x <= self.hi
    }

    pub fn intersects(&self, other: &Self) -> bool {
        let (lo, lo_closed) = if self.lo > other.lo {
            (&self.lo, self.lo_closed)
        } else if other.lo > self.lo {
            (&other.lo, other.lo_closed)
        } else {
            (&self.lo, self.lo_closed && other.lo_closed)
        };
        let (hi, hi_closed) = if self.hi < other.hi {
            (&self.hi, self.hi_closed)
        } else if other.hi < self.hi {
            (&other.hi, other.hi_closed)
        } else {
            (&self.hi, self.hi_closed && other.hi_closed)
        };
        lo < hi || (lo == hi && lo_closed && hi_closed)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        let lo_ok = self.lo > other.lo || (self.lo == other.lo && (other.lo_closed || !self.lo_closed));
        let hi_ok = self.hi < other.hi || (self.hi == other.hi && (other.hi_closed || !self.hi_closed));
        lo_ok && hi_ok
    }

    /// Some member of the cell: the midpoint, or the point itself.
    pub fn representative(&self) -> T {
        T::midpoint(&self.lo, &self.hi)
    }
}

impl<T: Scalar> fmt::Display for IntervalCell<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            return write!(f, "{{{}}}", self.lo);
        }
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// `u = K·x + l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap<T> {
    pub gain: T,
    pub offset: T,
}

impl<T: Scalar> AffineMap<T> {
    pub fn new(gain: T, offset: T) -> Self {
        AffineMap { gain, offset }
    }

    pub fn constant(offset: T) -> Self {
        AffineMap {
            gain: T::zero(),
            offset,
        }
    }

    /// The concrete input at `x`.
    pub fn input_at(&self, x: &T) -> T {
        self.gain.clone() * x.clone() + self.offset.clone()
    }

    /// The closed-loop successor `x + κ(x) = (1 + K)·x + l`.
    pub fn successor(&self, x: &T) -> T {
        x.clone() + self.input_at(x)
    }

    pub fn slope(&self) -> T {
        T::one() + self.gain.clone()
    }
}

/// Exact image of `cell` under the closed loop of `m`.
pub fn affine_image<T: Scalar>(cell: &IntervalCell<T>, m: &AffineMap<T>) -> IntervalCell<T> {
    let s = m.slope();
    if s.is_zero() {
        return IntervalCell::point(m.offset.clone());
    }
    let at = |x: &T| s.clone() * x.clone() + m.offset.clone();
    if s.is_positive() {
        IntervalCell {
            lo: at(&cell.lo),
            hi: at(&cell.hi),
            lo_closed: cell.lo_closed,
            hi_closed: cell.hi_closed,
        }
    } else {
        IntervalCell {
            lo: at(&cell.hi),
            hi: at(&cell.lo),
            lo_closed: cell.hi_closed,
            hi_closed: cell.lo_closed,
        }
    }
}

/// Named cells over a domain interval. Cells may overlap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellCover<T> {
    domain: IntervalCell<T>,
    cells: Vec<(State, IntervalCell<T>)>,
}

impl<T: Scalar> CellCover<T> {
    pub fn new(domain: IntervalCell<T>, cells: Vec<(State, IntervalCell<T>)>) -> Result<Self> {
        let mut seen = StateSet::new();
        for (q, cell) in &cells {
            if !seen.insert(q.clone()) {
                return Err(Error::Format(format!("duplicate cell id `{q}`")));
            }
            if !cell.is_subset(&domain) {
                return Err(Error::OutOfDomain(format!("cell `{q}` = {cell} leaves {domain}")));
            }
        }
        Ok(CellCover { domain, cells })
    }

    pub fn domain(&self) -> &IntervalCell<T> {
        &self.domain
    }

    pub fn cells(&self) -> &[(State, IntervalCell<T>)] {
        &self.cells
    }

    pub fn ids(&self) -> StateSet {
        self.cells.iter().map(|(q, _)| q.clone()).collect()
    }

    pub fn cell(&self, q: &State) -> Result<&IntervalCell<T>> {
        self.cells
            .iter()
            .find(|(id, _)| id == q)
            .map(|(_, c)| c)
            .ok_or_else(|| Error::UnknownState(q.clone()))
    }

    /// Every cell meeting `set`.
    pub fn quantize(&self, set: &IntervalCell<T>) -> Result<StateSet> {
        if !set.is_subset(&self.domain) {
            return Err(Error::OutOfDomain(format!("{set} is not inside {}", self.domain)));
        }
        Ok(self
            .cells
            .iter()
            .filter(|(_, c)| c.intersects(set))
            .map(|(q, _)| q.clone())
            .collect())
    }

    pub fn quantize_point(&self, x: &T) -> Result<StateSet> {
        self.quantize(&IntervalCell::point(x.clone()))
    }

    fn breakpoints(&self) -> Vec<T> {
        let mut pts = vec![self.domain.lo.clone(), self.domain.hi.clone()];
        for (_, c) in &self.cells {
            pts.push(c.lo.clone());
            pts.push(c.hi.clone());
        }
        sort_dedup(&mut pts);
        pts
    }

    /// The cells cover the whole domain. Coverage only changes at cell
    /// endpoints, so checking each endpoint and each gap midpoint is exact.
    pub fn is_strict(&self) -> bool {
        let pts = self.breakpoints();
        let covered = |x: &T| !self.domain.contains(x) || self.cells.iter().any(|(_, c)| c.contains(x));
        pts.iter().all(covered) && pts.windows(2).all(|w| covered(&T::midpoint(&w[0], &w[1])))
    }

    /// No point lies in two cells.
    pub fn is_partition(&self) -> bool {
        self.is_strict()
            && self.cells.iter().enumerate().all(|(i, (_, a))| {
                self.cells[i + 1..].iter().all(|(_, b)| !a.intersects(b))
            })
    }
}

fn sort_dedup<T: Scalar>(v: &mut Vec<T>) {
    v.sort_by(|a, b| a.partial_cmp(b).expect("scalars are totally ordered"));
    v.dedup();
}

/// A cover together with named affine inputs and per-cell availability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverProblem<T> {
    pub cover: CellCover<T>,
    pub inputs: Vec<(Input, AffineMap<T>)>,
    pub availability: BTreeMap<State, InputSet>,
}

impl<T: Scalar> CoverProblem<T> {
    pub fn map(&self, u: &Input) -> Result<&AffineMap<T>> {
        self.inputs
            .iter()
            .find(|(id, _)| id == u)
            .map(|(_, m)| m)
            .ok_or_else(|| Error::UnknownInput(u.clone()))
    }

    pub fn build(&self) -> Result<FiniteTransitionSystem> {
        build_abstraction(&self.cover, &self.inputs, &self.availability)
    }
}

/// `F2(q, κ) = quantize(image of cell(q) under κ)` for every available
/// `(q, κ)`. This is the smallest transition map for which MCR holds.
pub fn build_abstraction<T: Scalar>(
    cover: &CellCover<T>,
    inputs: &[(Input, AffineMap<T>)],
    availability: &BTreeMap<State, InputSet>,
) -> Result<FiniteTransitionSystem> {
    let maps: BTreeMap<&Input, &AffineMap<T>> = inputs.iter().map(|(u, m)| (u, m)).collect();
    let mut rows = BTreeMap::new();
    for (q, available) in availability {
        let cell = cover.cell(q)?;
        for u in available {
            let m = maps.get(u).ok_or_else(|| Error::UnknownInput(u.clone()))?;
            let image = affine_image(cell, m);
            let succ = cover.quantize(&image).map_err(|_| Error::ImageEscapes {
                cell: q.clone(),
                input: u.clone(),
            })?;
            rows.insert((q.clone(), u.clone()), succ);
        }
    }
    FiniteTransitionSystem::from_parts(cover.ids(), maps.keys().map(|u| (*u).clone()).collect(), rows)
}

/// Exact MCR check `quantize(image(cell(q), κ)) ⊆ F2(q, κ)` on every
/// transition row of `abstraction`.
pub fn verify_mcr_interval<T: Scalar>(
    cover: &CellCover<T>,
    abstraction: &FiniteTransitionSystem,
    inputs: &[(Input, AffineMap<T>)],
) -> Result<bool> {
    for (q, u, succ) in abstraction.transitions() {
        let m = inputs
            .iter()
            .find(|(id, _)| id == u)
            .map(|(_, m)| m)
            .ok_or_else(|| Error::UnknownInput(u.clone()))?;
        let needed = cover.quantize(&affine_image(cover.cell(q)?, m))?;
        if !needed.is_subset(succ) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A finite sample of the concrete system: the given points, with `κ`
/// available at `x` when some cell holding `x` offers it and the successor
/// stays in the domain. Returns the system and the quantizer relation.
pub fn sample_concrete<T: Scalar>(
    problem: &CoverProblem<T>,
    points: &[T],
    name: impl Fn(&T) -> String,
) -> Result<(FiniteTransitionSystem, Relation)> {
    let mut ids = BTreeMap::new();
    for x in points {
        ids.insert(name(x), x.clone());
    }
    let lookup = |x: &T| -> Result<State> {
        ids.iter()
            .find(|(_, v)| *v == x)
            .map(|(k, _)| State::new(k))
            .ok_or_else(|| Error::OutOfDomain(format!("successor {x} is not a sample point")))
    };
    let mut rows = BTreeMap::new();
    let mut pairs = Vec::new();
    for (id, x) in &ids {
        let xs = State::new(id);
        let cells = problem.cover.quantize_point(x)?;
        for q in &cells {
            pairs.push((xs.clone(), q.clone()));
            for u in problem.availability.get(q).into_iter().flatten() {
                let next = problem.map(u)?.successor(x);
                if problem.cover.domain().contains(&next) {
                    rows.insert((xs.clone(), u.clone()), StateSet::from([lookup(&next)?]));
                }
            }
        }
    }
    let inputs: InputSet = problem.inputs.iter().map(|(u, _)| u.clone()).collect();
    let s1 = FiniteTransitionSystem::from_parts(ids.keys().map(State::new).collect(), inputs, rows)?;
    let abstract_states = problem.cover.ids();
    let r = Relation::new(s1.states().clone(), abstract_states, pairs)?;
    Ok((s1, r))
}

/// One range of constant inputs `u = c` over which the successor set of a
/// cell does not change.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantCase<T> {
    pub range: IntervalCell<T>,
    pub representative: T,
    pub successors: StateSet,
}

impl<T: Scalar> ConstantCase<T> {
    pub fn is_deterministic(&self) -> bool {
        self.successors.len() <= 1
    }
}

/// Splits the admissible constants for `cell(q)` into ranges with a fixed
/// successor set. The image `cell + c` changes its relation to a cover
/// endpoint `e` only when `c = e − lo` or `c = e − hi`, so evaluating each
/// breakpoint and each gap midpoint is exhaustive.
pub fn classify_constant_inputs<T: Scalar>(
    cover: &CellCover<T>,
    q: &State,
    admissible: &IntervalCell<T>,
) -> Result<Vec<ConstantCase<T>>> {
    let cell = cover.cell(q)?;
    let mut pts = vec![admissible.lo.clone(), admissible.hi.clone()];
    for e in cover.breakpoints() {
        for b in [e.clone() - cell.lo.clone(), e - cell.hi.clone()] {
            if admissible.closure_contains(&b) {
                pts.push(b);
            }
        }
    }
    sort_dedup(&mut pts);

    let mut cases = Vec::new();
    let mut push = |range: IntervalCell<T>, c: T| -> Result<()> {
        let successors = cover.quantize(&affine_image(cell, &AffineMap::constant(c.clone())))?;
        cases.push(ConstantCase {
            range,
            representative: c,
            successors,
        });
        Ok(())
    };
    for (i, p) in pts.iter().enumerate() {
        if admissible.contains(p) {
            push(IntervalCell::point(p.clone()), p.clone())?;
        }
        if let Some(next) = pts.get(i + 1) {
            let gap = IntervalCell::new(p.clone(), next.clone(), false, false)?;
            push(gap, T::midpoint(p, next))?;
        }
    }
    Ok(cases)
}

/// The three-cell partition `q1 = [−L, 0)`, `q2 = {0}`, `q3 = (0, L]`.
pub fn fig8_cover(l: &Rational) -> Result<CellCover<Rational>> {
    let zero = Rational::from_i64(0);
    let neg = -l.clone();
    CellCover::new(
        IntervalCell::closed(neg.clone(), l.clone())?,
        vec![
            (State::new("q1"), IntervalCell::new(neg, zero.clone(), true, false)?),
            (State::new("q2"), IntervalCell::point(zero.clone())),
            (State::new("q3"), IntervalCell::new(zero, l.clone(), false, true)?),
        ],
    )
}

/// Reach `q2 = {0}` from anywhere; nothing to avoid.
pub fn fig8_spec() -> ReachAvoidSpec {
    ReachAvoidSpec::new(states(["q1", "q2", "q3"]), states(["q2"]), StateSet::new())
}

/// Affine local controllers `κ1' = κ3' = −x` and `κ2' = 0`.
pub fn fig8_affine_problem(l: &Rational) -> Result<CoverProblem<Rational>> {
    let minus_x = AffineMap::new(Rational::from_i64(-1), Rational::from_i64(0));
    let zero = AffineMap::constant(Rational::from_i64(0));
    Ok(CoverProblem {
        cover: fig8_cover(l)?,
        inputs: vec![
            (Input::new("kappa1"), minus_x.clone()),
            (Input::new("kappa2"), zero),
            (Input::new("kappa3"), minus_x),
        ],
        availability: BTreeMap::from([
            (State::new("q1"), InputSet::from([Input::new("kappa1")])),
            (State::new("q2"), InputSet::from([Input::new("kappa2")])),
            (State::new("q3"), InputSet::from([Input::new("kappa3")])),
        ]),
    })
}

fn constant_id(c: &Rational) -> Input {
    Input::new(format!("c={c}"))
}

/// Constant inputs: `q1` uses `c1`, `q3` uses `c3`, `q2` stays put.
pub fn fig8_constant_problem(l: &Rational, c1: &[Rational], c3: &[Rational]) -> Result<CoverProblem<Rational>> {
    let zero = Rational::from_i64(0);
    let mut inputs: Vec<(Input, AffineMap<Rational>)> = Vec::new();
    let mut add = |c: &Rational| {
        let id = constant_id(c);
        if !inputs.iter().any(|(u, _)| *u == id) {
            inputs.push((id.clone(), AffineMap::constant(c.clone())));
        }
        id
    };
    let a1: InputSet = c1.iter().map(&mut add).collect();
    let a3: InputSet = c3.iter().map(&mut add).collect();
    let a2 = InputSet::from([add(&zero)]);
    Ok(CoverProblem {
        cover: fig8_cover(l)?,
        inputs,
        availability: BTreeMap::from([
            (State::new("q1"), a1),
            (State::new("q2"), a2),
            (State::new("q3"), a3),
        ]),
    })
}

#[derive(Clone, Debug)]
pub struct Fig8ConstantCase {
    pub label: String,
    pub case: ConstantCase<Rational>,
    /// Successors of `q3` under the mirrored constant `−c`.
    pub mirrored_successors: StateSet,
    pub abstraction: FiniteTransitionSystem,
    pub solvable: bool,
}

#[derive(Clone, Debug)]
pub struct Fig8AffineResult {
    pub abstraction: FiniteTransitionSystem,
    pub deterministic: bool,
    pub mcr_verified: bool,
    pub frr_on_samples: bool,
    pub synthesis: Option<SynthesisResult>,
}

#[derive(Clone, Debug)]
pub struct Fig8Report {
    pub l: Rational,
    pub constant_cases: Vec<Fig8ConstantCase>,
    /// Every representative constant offered at once, so any static choice
    /// of constants per cell is covered.
    pub combined: FiniteTransitionSystem,
    pub combined_solvable: bool,
    pub affine: Fig8AffineResult,
    pub argument: String,
}

impl Fig8Report {
    pub fn constants_infeasible(&self) -> bool {
        !self.combined_solvable && self.constant_cases.iter().all(|c| !c.solvable)
    }
}

/// Exact case analysis over constant inputs `c ∈ [0, L]` for `q1` (and
/// `−c` for `q3`), followed by synthesis on each representative, and the
/// affine alternative for comparison.
pub fn prove_frr_infeasible_fig8(l: &Rational) -> Result<Fig8Report> {
    let zero = Rational::from_i64(0);
    if *l <= zero {
        return Err(Error::InvalidInterval(format!("L must be positive, got {l}")));
    }
    let cover = fig8_cover(l)?;
    let spec = fig8_spec();
    let q1 = State::new("q1");
    let q3 = State::new("q3");
    let cases = classify_constant_inputs(&cover, &q1, &IntervalCell::closed(zero.clone(), l.clone())?)?;

    let mut constant_cases = Vec::new();
    for case in cases {
        let c = case.representative.clone();
        let problem = fig8_constant_problem(l, std::slice::from_ref(&c), &[-c.clone()])?;
        let abstraction = problem.build()?;
        let mirrored_successors = abstraction.post(&q3, &constant_id(&-c.clone())).clone();
        let solvable = synthesize_reach_avoid(&abstraction, &spec)?.is_solved();
        let label = if case.range.is_point() {
            format!("c = {}", case.range.lo())
        } else {
            format!("{} < c < {}", case.range.lo(), case.range.hi())
        };
        constant_cases.push(Fig8ConstantCase {
            label,
            case,
            mirrored_successors,
            abstraction,
            solvable,
        });
    }

    let reps: Vec<Rational> = constant_cases.iter().map(|c| c.case.representative.clone()).collect();
    let mirrored: Vec<Rational> = reps.iter().map(|c| -c.clone()).collect();
    let combined = fig8_constant_problem(l, &reps, &mirrored)?.build()?;
    let combined_solvable = synthesize_reach_avoid(&combined, &spec)?.is_solved();

    let affine_problem = fig8_affine_problem(l)?;
    let abstraction = affine_problem.build()?;
    let mcr_verified = verify_mcr_interval(&affine_problem.cover, &abstraction, &affine_problem.inputs)?;
    let (s1, r) = sample_concrete(&affine_problem, &fig8_samples(l), |x| format!("x={x}"))?;
    let frr_on_samples = check_frr(&s1, &abstraction, &r)?.holds;
    let synthesis = match synthesize_reach_avoid(&abstraction, &spec)? {
        Synthesis::Solved(s) => Some(s),
        Synthesis::Unsolvable { .. } => None,
    };

    let argument = format!(
        "The successor set of q1 under u = c depends only on how c compares with the \
         breakpoints e - lo and e - hi over cover endpoints e, so the {} ranges above are \
         exhaustive for c in [0, {l}]; q3 is the mirror image. None of them confines q1 to q2, \
         and the abstraction offering every representative at once has no solution either.",
        constant_cases.len()
    );

    Ok(Fig8Report {
        l: l.clone(),
        constant_cases,
        combined,
        combined_solvable,
        affine: Fig8AffineResult {
            deterministic: abstraction.is_deterministic(),
            abstraction,
            mcr_verified,
            frr_on_samples,
            synthesis,
        },
        argument,
    })
}

/// `{−L, −L/2, 0, L/2, L}`.
pub fn fig8_samples(l: &Rational) -> Vec<Rational> {
    let half = l.clone() / Rational::from_i64(2);
    vec![-l.clone(), -half.clone(), Rational::from_i64(0), half, l.clone()]
}

/// Overlapping cover `p1 = [−L, 0]`, `p2 = [0, L]` with constants `±L`.
/// The minimal abstraction has `F2(p1, c=L) = {p1, p2}`; dropping `p1`
/// keeps the sampled ASR relation but breaks MCR.
#[derive(Clone, Debug)]
pub struct OverlapSeparation {
    pub problem: CoverProblem<Rational>,
    pub minimal: FiniteTransitionSystem,
    pub pruned: FiniteTransitionSystem,
    pub samples: FiniteTransitionSystem,
    pub relation: Relation,
    pub minimal_mcr: bool,
    pub pruned_mcr: bool,
    pub pruned_asr_on_samples: bool,
    pub pruned_mcr_on_samples: bool,
}

pub fn overlap_separation(l: &Rational) -> Result<OverlapSeparation> {
    let zero = Rational::from_i64(0);
    let cover = CellCover::new(
        IntervalCell::closed(-l.clone(), l.clone())?,
        vec![
            (State::new("p1"), IntervalCell::closed(-l.clone(), zero.clone())?),
            (State::new("p2"), IntervalCell::closed(zero, l.clone())?),
        ],
    )?;
    let up = constant_id(l);
    let down = constant_id(&-l.clone());
    let problem = CoverProblem {
        cover,
        inputs: vec![
            (up.clone(), AffineMap::constant(l.clone())),
            (down.clone(), AffineMap::constant(-l.clone())),
        ],
        availability: BTreeMap::from([
            (State::new("p1"), InputSet::from([up.clone()])),
            (State::new("p2"), InputSet::from([down])),
        ]),
    };
    let minimal = problem.build()?;
    let p1 = State::new("p1");
    let rows = minimal.transitions().map(|(x, u, succ)| {
        let mut succ = succ.clone();
        if *x == p1 && *u == up {
            succ.remove(&p1);
        }
        ((x.clone(), u.clone()), succ)
    });
    let rows: Vec<_> = rows.collect();
    let pruned = FiniteTransitionSystem::from_parts(minimal.states().clone(), minimal.inputs().clone(), rows)?;
    let (samples, relation) = sample_concrete(&problem, &fig8_samples(l), |x| format!("x={x}"))?;
    Ok(OverlapSeparation {
        minimal_mcr: verify_mcr_interval(&problem.cover, &minimal, &problem.inputs)?,
        pruned_mcr: verify_mcr_interval(&problem.cover, &pruned, &problem.inputs)?,
        pruned_asr_on_samples: check_asr(&samples, &pruned, &relation)?.holds,
        pruned_mcr_on_samples: check_mcr(&samples, &pruned, &relation)?.holds,
        problem,
        minimal,
        pruned,
        samples,
        relation,
    })
}

// Serialized forms use text for scalars so rationals stay exact.

#[derive(Serialize, Deserialize)]
pub(crate) struct CellDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<State>,
    pub lo: String,
    pub hi: String,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl CellDoc {
    pub(crate) fn from_cell<T: Scalar>(id: Option<State>, c: &IntervalCell<T>) -> Self {
        CellDoc {
            id,
            lo: c.lo.to_text(),
            hi: c.hi.to_text(),
            lo_closed: c.lo_closed,
            hi_closed: c.hi_closed,
        }
    }

    pub(crate) fn to_cell<T: Scalar>(&self) -> Result<IntervalCell<T>> {
        IntervalCell::new(
            T::parse_scalar(&self.lo)?,
            T::parse_scalar(&self.hi)?,
            self.lo_closed,
            self.hi_closed,
        )
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct MapDoc {
    pub id: Input,
    pub gain: String,
    pub offset: String,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct ProblemDoc {
    pub domain: CellDoc,
    pub cells: Vec<CellDoc>,
    #[serde(default)]
    pub inputs: Vec<MapDoc>,
    #[serde(default)]
    pub availability: BTreeMap<State, InputSet>,
}

impl<T: Scalar> From<&CoverProblem<T>> for ProblemDoc {
    fn from(p: &CoverProblem<T>) -> Self {
        ProblemDoc {
            domain: CellDoc::from_cell(None, &p.cover.domain),
            cells: p
                .cover
                .cells
                .iter()
                .map(|(q, c)| CellDoc::from_cell(Some(q.clone()), c))
                .collect(),
            inputs: p
                .inputs
                .iter()
                .map(|(u, m)| MapDoc {
                    id: u.clone(),
                    gain: m.gain.to_text(),
                    offset: m.offset.to_text(),
                })
                .collect(),
            availability: p.availability.clone(),
        }
    }
}

impl<T: Scalar> TryFrom<ProblemDoc> for CoverProblem<T> {
    type Error = Error;

    fn try_from(doc: ProblemDoc) -> Result<Self> {
        let mut cells = Vec::new();
        for c in &doc.cells {
            let id = c
                .id
                .clone()
                .ok_or_else(|| Error::Format("cover cell without `id`".into()))?;
            cells.push((id, c.to_cell()?));
        }
        let cover = CellCover::new(doc.domain.to_cell()?, cells)?;
        let mut inputs = Vec::new();
        for m in doc.inputs {
            inputs.push((m.id, AffineMap::new(T::parse_scalar(&m.gain)?, T::parse_scalar(&m.offset)?)));
        }
        for (q, us) in &doc.availability {
            cover.cell(q)?;
            for u in us {
                if !inputs.iter().any(|(id, _)| id == u) {
                    return Err(Error::UnknownInput(u.clone()));
                }
            }
        }
        Ok(CoverProblem {
            cover,
            inputs,
            availability: doc.availability,
        })
    }
}

impl<T: Scalar> Serialize for CoverProblem<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ProblemDoc::from(self).serialize(s)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for CoverProblem<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = ProblemDoc::deserialize(d)?;
        CoverProblem::try_from(doc).map_err(serde::de::Error::custom)
    }
}

//! Subsets of the ambient group, the corpus constructions, representation
//! functions and K_{s,t}-freeness.
//!
//! A set is K_{s,t}-free when it contains no sumset `B + C` with `|B| = s` and
//! `|C| = t`. Translating such a grid so that `0 ∈ C` puts `B` inside `A` and
//! turns the other `t − 1` elements of `C` into nonzero shifts `d` with
//! `B − d ⊆ A`. So `A` is free exactly when every `s`-subset `T` of `A` has
//! fewer than `t − 1` admissible nonzero shifts.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counting::EquationSpec;
use crate::error::{Error, Result, Witness};
use crate::functions::{Dfn, IntFn};
use crate::groups::{GroupCtx, GroupKind};
use crate::rng;

/// Sets are stored with a membership bitset over the whole group.
pub const MAX_UNIVERSE: usize = 1 << 30;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub construction: String,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn new(construction: &str) -> Self {
        Provenance { construction: construction.to_string(), ..Default::default() }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(key.to_string(), serde_json::to_value(value).unwrap_or_default());
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn get(&self, i: usize) -> bool {
        self.0[i >> 6] >> (i & 63) & 1 == 1
    }
    fn set(&mut self, i: usize) {
        self.0[i >> 6] |= 1 << (i & 63);
    }
}

#[derive(Debug, Clone)]
pub struct SetA {
    ctx: Arc<GroupCtx>,
    elements: Vec<usize>,
    member: Bits,
    provenance: Provenance,
}

impl PartialEq for SetA {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.elements == other.elements
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridWitness {
    pub b: Vec<usize>,
    pub c: Vec<usize>,
}

impl From<GridWitness> for Witness {
    fn from(w: GridWitness) -> Self {
        Witness::Grid { b: w.b, c: w.c }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Freeness {
    Free,
    Violation(GridWitness),
}

impl Freeness {
    pub fn is_free(&self) -> bool {
        matches!(self, Freeness::Free)
    }
}

impl SetA {
    /// Sorts and deduplicates `elements`; every index must be `< N`.
    pub fn new(ctx: &Arc<GroupCtx>, mut elements: Vec<usize>, provenance: Provenance) -> Result<Self> {
        let n = ctx.order();
        if n > MAX_UNIVERSE {
            return Err(Error::usage(format!("group of order {n} is too large for explicit sets")));
        }
        elements.sort_unstable();
        elements.dedup();
        if let Some(&x) = elements.last() {
            if x >= n {
                return Err(Error::usage(format!("element index {x} out of range for {ctx}")));
            }
        }
        let mut member = Bits::new(n);
        for &x in &elements {
            member.set(x);
        }
        Ok(SetA { ctx: ctx.clone(), elements, member, provenance })
    }

    pub fn from_elements(ctx: &Arc<GroupCtx>, elements: Vec<usize>) -> Result<Self> {
        Self::new(ctx, elements, Provenance::new("explicit"))
    }

    pub fn ctx(&self) -> &Arc<GroupCtx> {
        &self.ctx
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        x < self.ctx.order() && self.member.get(x)
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn indicator(&self) -> Dfn {
        Dfn::indicator(&self.ctx, &self.elements)
    }

    pub fn indicator_int(&self) -> IntFn {
        IntFn::indicator(&self.ctx, &self.elements)
    }

    /// `{a·x : x ∈ A}` for an integer multiplier.
    pub fn dilate(&self, a: i64) -> Result<SetA> {
        let xs = self.elements.iter().map(|&x| self.ctx.smul_int(a, x)).collect();
        SetA::new(&self.ctx, xs, Provenance::new("dilate").param("factor", a))
    }

    /// Re-embeds a cyclic set into another cyclic group, shifting every
    /// residue (read as an integer in `[0, M)`) by `offset`.
    pub fn embed(&self, target: &Arc<GroupCtx>, offset: u64) -> Result<SetA> {
        let (Some(_), Some(m2)) = (self.ctx.modulus(), target.modulus()) else {
            return Err(Error::usage("embedding is defined between cyclic groups"));
        };
        let xs = self.elements.iter().map(|&x| ((x as u64 + offset) % m2) as usize).collect();
        let mut prov = self.provenance.clone();
        prov.params.insert("embedded_offset".into(), offset.into());
        SetA::new(target, xs, prov)
    }

    /// Line 1 `ctx=<encoding>`, an optional `# provenance <json>` line, then one element per line.
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "ctx={}", self.ctx)?;
        let prov = serde_json::to_string(&self.provenance).map_err(|e| Error::parse(e.to_string()))?;
        writeln!(w, "# provenance {prov}")?;
        for &x in &self.elements {
            writeln!(w, "{}", self.ctx.format_elem(x))?;
        }
        Ok(())
    }

    pub fn read_from(r: impl BufRead) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::parse("empty set file"))??;
        let enc = header
            .trim()
            .strip_prefix("ctx=")
            .ok_or_else(|| Error::parse("set file must start with ctx=<encoding>"))?;
        let ctx = Arc::new(enc.parse::<GroupCtx>()?);
        let mut provenance = Provenance::new("file");
        let mut xs = Vec::new();
        for line in lines {
            let line = line?;
            let line = line.trim();
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(json) = rest.trim().strip_prefix("provenance") {
                    provenance = serde_json::from_str(json.trim())
                        .map_err(|e| Error::parse(format!("bad provenance: {e}")))?;
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            xs.push(ctx.parse_elem(line)?);
        }
        SetA::new(&ctx, xs, provenance)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(f);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(f))
    }
}

/// `r(d) = #{(a, a′) ∈ A²: a − a′ = d}`, exactly.
pub fn rep_diff_int(a: &SetA) -> IntFn {
    a.indicator_int()
        .convolve(&a.indicator_int().reflect())
        .expect("counts fit in i64")
}

pub fn rep_diff(a: &SetA) -> Dfn {
    rep_diff_int(a).to_dfn()
}

/// Shifts `d` (including `0`) with `x − d ∈ A` for every `x` in `prefix`,
/// starting from the candidates of the first entry.
fn shift_candidates(a: &SetA, first: usize) -> Vec<usize> {
    let ctx = a.ctx();
    a.elements().iter().map(|&b| ctx.sub(first, b)).collect()
}

fn refine(a: &SetA, cands: &[usize], x: usize) -> Vec<usize> {
    let ctx = a.ctx();
    cands.iter().copied().filter(|&d| a.contains(ctx.sub(x, d))).collect()
}

/// `r_A(a_1,…,a_s) = #{d ≠ 0 : a_i − d ∈ A for all i}`.
pub fn rep_tuple(a: &SetA, tuple: &[usize]) -> Result<u64> {
    if tuple.len() < 2 {
        return Err(Error::usage("rep_tuple needs s >= 2"));
    }
    if let Some(&x) = tuple.iter().find(|&&x| !a.contains(x)) {
        return Err(Error::usage(format!("tuple entry {} is not in A", a.ctx().format_elem(x))));
    }
    let mut cands = shift_candidates(a, tuple[0]);
    for &x in &tuple[1..] {
        cands = refine(a, &cands, x);
    }
    Ok(cands.len() as u64 - 1)
}

/// Aggregates of `r_A` over all of `A^s`, split by whether the tuple has a
/// repeated coordinate.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleStats {
    pub s: usize,
    pub t: usize,
    pub tuples: u128,
    pub distinct_tuples: u128,
    pub sum_r_distinct: u128,
    pub sum_r_degenerate: u128,
    pub max_r_distinct: u64,
    pub max_r_degenerate: u64,
    /// Tuples with `r_A > t − 1`.
    pub above_threshold: u128,
    /// `Σ (r_A − (t − 1))_+` over tuples with distinct entries.
    pub excess_distinct: u128,
    pub excess_degenerate: u128,
}

impl TupleStats {
    fn merge(mut self, o: TupleStats) -> Self {
        self.tuples += o.tuples;
        self.distinct_tuples += o.distinct_tuples;
        self.sum_r_distinct += o.sum_r_distinct;
        self.sum_r_degenerate += o.sum_r_degenerate;
        self.max_r_distinct = self.max_r_distinct.max(o.max_r_distinct);
        self.max_r_degenerate = self.max_r_degenerate.max(o.max_r_degenerate);
        self.above_threshold += o.above_threshold;
        self.excess_distinct += o.excess_distinct;
        self.excess_degenerate += o.excess_degenerate;
        self
    }

    pub fn sum_r(&self) -> u128 {
        self.sum_r_distinct + self.sum_r_degenerate
    }

    pub fn excess(&self) -> u128 {
        self.excess_distinct + self.excess_degenerate
    }
}

fn falling(n: u128, m: usize) -> u128 {
    (0..m as u128).map(|i| n.saturating_sub(i)).product()
}

/// Walks every ordered `s`-tuple of `A`, refining the shift set entry by
/// entry; once only the zero shift survives the remaining completions are
/// counted in bulk.
pub fn tuple_stats(a: &SetA, s: usize, t: usize) -> TupleStats {
    let n = a.len() as u128;
    let empty = TupleStats { s, t, ..Default::default() };
    if a.is_empty() || s == 0 {
        return empty;
    }
    let thr = t.saturating_sub(1) as u64;

    fn walk(a: &SetA, s: usize, thr: u64, prefix: &mut Vec<usize>, cands: &[usize], st: &mut TupleStats) {
        let n = a.len() as u128;
        let distinct = prefix.iter().enumerate().all(|(i, x)| !prefix[..i].contains(x));
        if cands.len() == 1 {
            let rest = s - prefix.len();
            st.tuples += n.pow(rest as u32);
            if distinct {
                st.distinct_tuples += falling(n - prefix.len() as u128, rest);
            }
            return;
        }
        if prefix.len() == s {
            let r = cands.len() as u64 - 1;
            let over = r.saturating_sub(thr) as u128;
            st.tuples += 1;
            st.above_threshold += (r > thr) as u128;
            if distinct {
                st.distinct_tuples += 1;
                st.sum_r_distinct += r as u128;
                st.max_r_distinct = st.max_r_distinct.max(r);
                st.excess_distinct += over;
            } else {
                st.sum_r_degenerate += r as u128;
                st.max_r_degenerate = st.max_r_degenerate.max(r);
                st.excess_degenerate += over;
            }
            return;
        }
        for &x in a.elements() {
            let next = refine(a, cands, x);
            prefix.push(x);
            walk(a, s, thr, prefix, &next, st);
            prefix.pop();
        }
    }

    let parts: Vec<TupleStats> = a
        .elements()
        .par_iter()
        .map(|&x| {
            let mut st = TupleStats { s, t, ..Default::default() };
            let cands = shift_candidates(a, x);
            walk(a, s, thr, &mut vec![x], &cands, &mut st);
            st
        })
        .collect();
    let out = parts.into_iter().fold(empty, TupleStats::merge);
    debug_assert_eq!(out.tuples, n.pow(s as u32));
    out
}

fn make_witness(a: &SetA, tuple: &[usize], cands: &[usize], t: usize) -> GridWitness {
    let ctx = a.ctx();
    let mut shifts: Vec<usize> = cands.iter().copied().filter(|&d| d != 0).collect();
    shifts.sort_unstable();
    // d_1 = 0: x_i = a_i, y_j = −d_j
    let mut b = tuple.to_vec();
    let mut c: Vec<usize> = std::iter::once(0).chain(shifts[..t - 1].iter().map(|&d| ctx.neg(d))).collect();
    b.sort_unstable();
    c.sort_unstable();
    GridWitness { b, c }
}

/// Depth-first search over increasing index tuples drawn from `pool`,
/// seeded with `prefix`/`cands`; returns the first tuple admitting `t − 1`
/// nonzero shifts.
fn search_grid(
    a: &SetA,
    pool: &[usize],
    start: usize,
    need: usize,
    t: usize,
    prefix: &mut Vec<usize>,
    cands: &[usize],
) -> Option<GridWitness> {
    if cands.len() < t {
        return None;
    }
    if need == 0 {
        return Some(make_witness(a, prefix, cands, t));
    }
    for i in start..pool.len() {
        if pool.len() - i < need {
            break;
        }
        let next = refine(a, cands, pool[i]);
        prefix.push(pool[i]);
        let hit = search_grid(a, pool, i + 1, need - 1, t, prefix, &next);
        prefix.pop();
        if hit.is_some() {
            return hit;
        }
    }
    None
}

/// Decides K_{s,t}-freeness. The returned witness comes from the
/// lexicographically smallest violating `s`-subset (by index).
pub fn is_kst_free(a: &SetA, s: usize, t: usize) -> Result<Freeness> {
    if s < 2 || s > t {
        return Err(Error::usage(format!("need 2 <= s <= t, got s={s}, t={t}")));
    }
    if a.len() < s {
        return Ok(Freeness::Free);
    }
    let els = a.elements();
    let hit = (0..els.len()).into_par_iter().find_map_first(|i| {
        let cands = shift_candidates(a, els[i]);
        search_grid(a, els, i + 1, s - 1, t, &mut vec![els[i]], &cands)
    });
    Ok(hit.map_or(Freeness::Free, Freeness::Violation))
}

/// Precondition helper: `Err` carrying the grid when `A` is not K_{s,t}-free.
pub fn require_kst_free(a: &SetA, s: usize, t: usize) -> Result<()> {
    match is_kst_free(a, s, t)? {
        Freeness::Free => Ok(()),
        Freeness::Violation(w) => Err(Error::Precondition {
            msg: format!("set is not K_{{{s},{t}}}-free"),
            witness: Some(w.into()),
        }),
    }
}

/// `|B| = s`, `|C| = t`, both without repeats, and `B + C ⊆ A`.
pub fn check_grid(a: &SetA, w: &GridWitness, s: usize, t: usize) -> bool {
    let distinct = |v: &[usize]| {
        let mut u = v.to_vec();
        u.sort_unstable();
        u.dedup();
        u.len() == v.len()
    };
    w.b.len() == s
        && w.c.len() == t
        && distinct(&w.b)
        && distinct(&w.c)
        && w.b.iter().all(|&x| w.c.iter().all(|&y| a.contains(a.ctx().add(x, y))))
}

/// Would adding `x` to the free set `cur` create a K_{s,t} grid? Any new grid
/// can be translated so that `x` lies in `B`, so only `s`-sets containing `x`
/// need checking.
fn grid_through(cur: &SetA, x: usize, s: usize, t: usize) -> bool {
    let mut with = cur.elements().to_vec();
    with.push(x);
    let ext = SetA::new(cur.ctx(), with, Provenance::default()).expect("indices in range");
    let cands = shift_candidates(&ext, x);
    let pool: Vec<usize> = cur.elements().to_vec();
    search_grid(&ext, &pool, 0, s - 1, t, &mut vec![x], &cands).is_some()
}

fn universe(ctx: &GroupCtx) -> Vec<usize> {
    match ctx.kind() {
        GroupKind::Cyclic { .. } => (0..ctx.model_len() as usize).collect(),
        GroupKind::VectorSpace { .. } => (0..ctx.order()).collect(),
    }
}

/// `{2p·i + (i² mod p) : 0 <= i < p}`, a Sidon set of integers in
/// `[0, 2p² + p)`. By default the interval is modelled inside `Z_{2(2p²+p)}`;
/// an explicit modulus `M >= 2p² + p` gives the set in plain `Z_M`, accepted
/// only if it is still Sidon there.
pub fn erdos_turan_sidon(p: u64, m: Option<u64>) -> Result<SetA> {
    if !crate::groups::field::is_prime(p) {
        return Err(Error::usage(format!("erdos_turan_sidon needs a prime, got {p}")));
    }
    let natural = 2 * p * p + p;
    let ctx = match m {
        None => GroupCtx::interval_model(natural, 2 * natural)?,
        Some(m) if m >= natural => GroupCtx::cyclic(m)?,
        Some(m) => return Err(Error::usage(format!("modulus {m} is below 2p^2+p = {natural}"))),
    };
    let ctx = Arc::new(ctx);
    let xs = (0..p).map(|i| (2 * p * i + (i * i) % p) as usize).collect();
    let a = SetA::new(&ctx, xs, Provenance::new("erdos_turan_sidon").param("p", p).param("m", ctx.order()))?;
    if let Freeness::Violation(w) = is_kst_free(&a, 2, 2)? {
        return Err(Error::usage(format!(
            "erdos_turan_sidon({p}) is not Sidon modulo {} (B={:?}, C={:?})",
            ctx.order(),
            w.b,
            w.c
        )));
    }
    Ok(a)
}

/// Random-order greedy insertion over the universe of `ctx` (the modelled
/// interval for cyclic groups), keeping the set K_{s,t}-free.
pub fn greedy_kst_free(ctx: &Arc<GroupCtx>, s: usize, t: usize, seed: u64) -> Result<SetA> {
    if s < 2 || s > t {
        return Err(Error::usage(format!("need 2 <= s <= t, got s={s}, t={t}")));
    }
    let mut order = universe(ctx);
    order.shuffle(&mut rng::stream(seed, rng::label("greedy_kst_free")));
    let prov = Provenance::new("greedy_kst_free").param("s", s).param("t", t).seed(seed);
    let mut cur = SetA::new(ctx, Vec::new(), prov.clone())?;
    for x in order {
        if !grid_through(&cur, x, s, t) {
            let mut xs = cur.elements().to_vec();
            xs.push(x);
            cur = SetA::new(ctx, xs, prov.clone())?;
        }
    }
    Ok(cur)
}

/// Greedy K_{s,t}-free subset of `[0, n)` inside `Z_{2n}`.
pub fn greedy_kst_free_interval(s: usize, t: usize, n: u64, seed: u64) -> Result<SetA> {
    let ctx = Arc::new(GroupCtx::interval_model(n, 2 * n)?);
    greedy_kst_free(&ctx, s, t, seed)
}

/// Each universe element independently with probability `density`.
pub fn random_subset(ctx: &Arc<GroupCtx>, density: f64, seed: u64) -> Result<SetA> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::usage(format!("density {density} outside [0, 1]")));
    }
    let mut r = rng::stream(seed, rng::label("random_subset"));
    let xs = universe(ctx).into_iter().filter(|_| r.gen_bool(density)).collect();
    SetA::new(ctx, xs, Provenance::new("random_subset").param("density", density).seed(seed))
}

/// The `F_q`-span of `basis` as a set.
pub fn subspace(ctx: &Arc<GroupCtx>, basis: &[usize]) -> Result<SetA> {
    let field = ctx.field().ok_or_else(|| Error::usage("subspace needs a vector-space group"))?;
    let mut pts = vec![0usize];
    for &v in basis {
        if v >= ctx.order() {
            return Err(Error::usage(format!("basis index {v} out of range")));
        }
        let mut next = Vec::with_capacity(pts.len() * field.q() as usize);
        for c in 0..field.q() {
            let cv = ctx.smul_field(c, v)?;
            next.extend(pts.iter().map(|&p| ctx.add(p, cv)));
        }
        next.sort_unstable();
        next.dedup();
        pts = next;
    }
    let fmt: Vec<String> = basis.iter().map(|&v| ctx.format_elem(v)).collect();
    SetA::new(ctx, pts, Provenance::new("subspace").param("basis", fmt))
}

/// Does `A ∪ {x}` (with `x ∉ A`) contain a nontrivial solution of `eq`? Such
/// a solution must use `x`; positions with equal coefficients are
/// interchangeable so one representative per coefficient value is tried.
fn solution_through(eq: &EquationSpec, cur: &SetA, x: usize) -> bool {
    let ctx = cur.ctx();
    let mut pool = cur.elements().to_vec();
    pool.push(x);
    let member = |y: usize| y == x || cur.contains(y);
    let k = eq.k();
    let a = eq.coeffs();
    let mut seen = Vec::new();
    for pos in 0..k {
        if seen.contains(&a[pos]) {
            continue;
        }
        seen.push(a[pos]);
        let inv = (0..k).filter(|&j| j != pos).find_map(|j| eq.inverse_multiplier(ctx, j).map(|u| (j, u)));
        let j = inv.map_or_else(|| (0..k).find(|&j| j != pos).expect("k >= 3"), |(j, _)| j);
        let mut xs = vec![0usize; k];
        xs[pos] = x;
        let free: Vec<usize> = (0..k).filter(|&i| i != pos && i != j).collect();
        let found = enumerate_until(&free, &pool, &mut xs, 0, &mut |xs| {
            xs[j] = 0;
            let target = ctx.neg(eq.eval(ctx, xs));
            match inv {
                Some((_, u)) => {
                    let y = ctx.smul_int(u, target);
                    if !member(y) {
                        return false;
                    }
                    xs[j] = y;
                    xs.iter().any(|&v| v != xs[0])
                }
                None => pool.iter().any(|&y| {
                    ctx.smul_int(a[j], y) == target && {
                        xs[j] = y;
                        xs.iter().any(|&v| v != xs[0])
                    }
                }),
            }
        });
        if found {
            return true;
        }
    }
    false
}

fn enumerate_until(
    free: &[usize],
    pool: &[usize],
    xs: &mut Vec<usize>,
    depth: usize,
    visit: &mut dyn FnMut(&mut Vec<usize>) -> bool,
) -> bool {
    if depth == free.len() {
        return visit(xs);
    }
    for &y in pool {
        xs[free[depth]] = y;
        if enumerate_until(free, pool, xs, depth + 1, visit) {
            return true;
        }
    }
    false
}

/// Random-order greedy set whose only solutions to `eq` are diagonal,
/// optionally also kept K_{s,t}-free.
pub fn equation_free_greedy(
    ctx: &Arc<GroupCtx>,
    eq: &EquationSpec,
    seed: u64,
    kst: Option<(usize, usize)>,
) -> Result<SetA> {
    eq.validate(ctx)?;
    if let Some((s, t)) = kst {
        if s < 2 || s > t {
            return Err(Error::usage(format!("need 2 <= s <= t, got s={s}, t={t}")));
        }
    }
    let mut order = universe(ctx);
    order.shuffle(&mut rng::stream(seed, rng::label("equation_free_greedy")));
    let mut prov = Provenance::new("equation_free_greedy").param("eq", eq.to_string()).seed(seed);
    if let Some((s, t)) = kst {
        prov = prov.param("s", s).param("t", t);
    }
    let mut cur = SetA::new(ctx, Vec::new(), prov.clone())?;
    for x in order {
        if solution_through(eq, &cur, x) {
            continue;
        }
        if let Some((s, t)) = kst {
            if grid_through(&cur, x, s, t) {
                continue;
            }
        }
        let mut xs = cur.elements().to_vec();
        xs.push(x);
        cur = SetA::new(ctx, xs, prov.clone())?;
    }
    Ok(cur)
}

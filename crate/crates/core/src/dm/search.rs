//! Heuristic search over tiny-alphabet input distributions for the
//! input-description scheme.
//!
//! The search is explicitly a lower estimate of the true maximum: random
//! restarts followed by cyclic coordinate ascent on the factor simplices,
//! where each step projects a row toward a vertex or toward uniform at a
//! fixed ladder of step sizes. Deterministic for a fixed seed.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pmf::ZERO_FLOOR;

use super::{eval_thm2, CondPmf, DmRateReport, Thm2Input, STRICT_MARGIN, THM2_VARS};

/// Step sizes of the projected moves, tried from coarsest to finest.
/// 1.0 lands exactly on the target (vertex or uniform row).
const STEP_LADDER: [f64; 6] = [1.0, 0.5, 0.25, 0.1, 0.05, 0.02];

/// Full coordinate-ascent passes per restart before giving up.
const MAX_CYCLES: usize = 50;

/// Minimum score improvement counted as progress.
const IMPROVE_EPS: f64 = 1e-12;

/// The fixed part of a search problem: state law and channel law.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thm2Channel {
    /// Cardinalities for `s`, `x1`, `x2`, `y2`, `y3`.
    pub alphabets: BTreeMap<String, usize>,
    pub q_s: CondPmf,
    pub channel: CondPmf,
}

impl Thm2Channel {
    pub fn validate(&self) -> Result<()> {
        for v in ["s", "x1", "x2", "y2", "y3"] {
            if !self.alphabets.contains_key(v) {
                return Err(Error::UnknownVariable(format!("{v} (missing alphabet)")));
            }
        }
        for (name, &size) in &self.alphabets {
            if !["s", "x1", "x2", "y2", "y3"].contains(&name.as_str()) {
                return Err(Error::UnknownVariable(format!(
                    "{name} (not a channel variable)"
                )));
            }
            if size == 0 {
                return Err(Error::InvalidParameter {
                    name: name.clone(),
                    reason: "alphabet cardinality must be >= 1".into(),
                });
            }
        }
        self.q_s.require_vars("q_s", &[], &["s"])?;
        self.channel
            .require_vars("channel", &["x1", "x2", "s"], &["y2", "y3"])?;
        Ok(())
    }
}

/// Result of [`search_thm2`]. `report` is the exact evaluation of the
/// returned factorization, so the reported rate never exceeds what
/// [`eval_thm2`] assigns to `factors`.
#[derive(Debug, Clone, Serialize)]
pub struct SearchOutcome {
    pub report: DmRateReport,
    pub factors: Thm2Input,
    pub restarts: u32,
    pub seed: u64,
    /// Restart that produced the returned factorization.
    pub best_restart: u32,
    pub feasible_found: bool,
    /// Best rate as a plain number: 0 when nothing feasible was found.
    pub best_rate_bits: f64,
    pub diagnostic: Option<String>,
}

#[derive(Clone, Copy, PartialEq)]
struct Score {
    feasible: bool,
    key: f64,
}

impl Score {
    fn beats(&self, other: &Score) -> bool {
        match (self.feasible, other.feasible) {
            (true, false) => true,
            (false, true) => false,
            _ => self.key > other.key + IMPROVE_EPS,
        }
    }
}

/// Searchable factors, in evaluation order.
const SEARCHED: [usize; 5] = [1, 2, 3, 4, 5];
const FACTOR_COUNT: usize = 7;

/// The seven conditional tables in evaluation order.
type FactorTables = [Vec<Vec<f64>>; FACTOR_COUNT];

/// Precomputed index tables: for every joint atom, the (row, col) lookup
/// into each factor table and the target cell of every entropy subset.
struct Evaluator {
    atoms: usize,
    factor_cells: Vec<[(u32, u32); FACTOR_COUNT]>,
    subset_cells: Vec<[u32; 16]>,
    subset_lens: [usize; 16],
}

/// Entropy subsets, indexed as used in `score()`.
const SUBSETS: [&[&str]; 16] = [
    &["u", "ur"],
    &["y3"],
    &["u", "ur", "y3"],
    &["s"],
    &["u", "ur", "s"],
    &["y2", "x_hat"],
    &["u", "ur", "y2", "x_hat"],
    &["x"],
    &["x_hat"],
    &["x", "x_hat"],
    &["u"],
    &["x1"], // spare diagnostic subset, keeps input power visible
    &["y2", "x_hat", "u"],
    &["ur", "y2", "x_hat", "u"],
    &["s", "u"],
    &["ur", "s", "u"],
];

impl Evaluator {
    fn new(sizes: &BTreeMap<String, usize>) -> Self {
        let card = |v: &str| sizes[if v == "x2" { "x_hat" } else { v }];
        let order: Vec<&str> = THM2_VARS.to_vec();
        let dims: Vec<usize> = order.iter().map(|v| card(v)).collect();
        let atoms: usize = dims.iter().product();
        let axis = |v: &str| {
            let canon = if v == "x2" { "x_hat" } else { v };
            order.iter().position(|o| *o == canon).unwrap()
        };

        // (given, out) lists per factor, matching `factor_tables` order.
        let factor_vars: [(&[&str], &[&str]); FACTOR_COUNT] = [
            (&[], &["s"]),
            (&["s"], &["u"]),
            (&["u", "s"], &["ur"]),
            (&["ur", "u", "s"], &["x1"]),
            (&["u", "s"], &["x"]),
            (&["x"], &["x_hat"]),
            (&["x1", "x2", "s"], &["y2", "y3"]),
        ];
        // (joint axis, mixed-radix weight) pairs of one index expression
        type Weights = Vec<(usize, usize)>;
        let weights = |vars: &[&str]| -> Weights {
            let mut w = 1usize;
            let mut terms = vec![(0usize, 0usize); vars.len()];
            for i in (0..vars.len()).rev() {
                terms[i] = (axis(vars[i]), w);
                w *= card(vars[i]);
            }
            terms
        };
        let factor_weights: Vec<(Weights, Weights)> = factor_vars
            .iter()
            .map(|(g, o)| (weights(g), weights(o)))
            .collect();
        let subset_weights: Vec<Weights> = SUBSETS.iter().map(|vars| weights(vars)).collect();
        let mut subset_lens = [0usize; 16];
        for (i, vars) in SUBSETS.iter().enumerate() {
            subset_lens[i] = vars.iter().map(|v| card(v)).product();
        }

        let mut factor_cells = Vec::with_capacity(atoms);
        let mut subset_cells = Vec::with_capacity(atoms);
        let mut digits = vec![0usize; order.len()];
        for atom in 0..atoms {
            let mut rem = atom;
            for a in (0..order.len()).rev() {
                digits[a] = rem % dims[a];
                rem /= dims[a];
            }
            let mut fc = [(0u32, 0u32); FACTOR_COUNT];
            for (f, (gw, ow)) in factor_weights.iter().enumerate() {
                let row: usize = gw.iter().map(|&(a, w)| digits[a] * w).sum();
                let col: usize = ow.iter().map(|&(a, w)| digits[a] * w).sum();
                fc[f] = (row as u32, col as u32);
            }
            factor_cells.push(fc);
            let mut sc = [0u32; 16];
            for (sid, sw) in subset_weights.iter().enumerate() {
                sc[sid] = sw.iter().map(|&(a, w)| digits[a] * w).sum::<usize>() as u32;
            }
            subset_cells.push(sc);
        }
        Self {
            atoms,
            factor_cells,
            subset_cells,
            subset_lens,
        }
    }

    fn score(&self, tables: &FactorTables) -> Score {
        let mut marginals: Vec<Vec<f64>> = self.subset_lens.iter().map(|&l| vec![0.0; l]).collect();
        for atom in 0..self.atoms {
            let mut p = 1.0;
            for (f, table) in tables.iter().enumerate() {
                let (r, c) = self.factor_cells[atom][f];
                p *= table[r as usize][c as usize];
                if p == 0.0 {
                    break;
                }
            }
            if p == 0.0 {
                continue;
            }
            let cells = &self.subset_cells[atom];
            for (sid, marg) in marginals.iter_mut().enumerate() {
                marg[cells[sid] as usize] += p;
            }
        }
        let h: Vec<f64> = marginals
            .iter()
            .map(|m| {
                m.iter()
                    .filter(|&&p| p > ZERO_FLOOR)
                    .map(|&p| -p * p.log2())
                    .sum()
            })
            .collect();

        let desc = h[7] + h[8] - h[9];
        let obj_dest = (h[0] + h[1] - h[2]) - (h[0] + h[3] - h[4]);
        let obj_relay = (h[0] + h[5] - h[6]) - (h[0] + h[3] - h[4]) - desc;
        let u_relay_raw = (h[10] + h[5] - h[12]) - (h[10] + h[3] - h[14]);
        let rhs =
            (h[0] + h[12] - h[10] - h[13]) - (h[0] + h[14] - h[10] - h[15]) + u_relay_raw.min(0.0);
        let slack = rhs - desc;
        if slack > STRICT_MARGIN {
            Score {
                feasible: true,
                key: obj_dest.min(obj_relay).max(0.0),
            }
        } else {
            Score {
                feasible: false,
                key: slack,
            }
        }
    }
}

fn sample_row<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    // Dirichlet(1) via normalized exponentials.
    let mut row: Vec<f64> = (0..len)
        .map(|_| -(rng.random::<f64>().max(f64::MIN_POSITIVE)).ln())
        .collect();
    let sum: f64 = row.iter().sum();
    for p in &mut row {
        *p /= sum;
    }
    row
}

fn pulled_row(row: &[f64], target: Option<usize>, t: f64) -> Vec<f64> {
    let len = row.len();
    let mut out = vec![0.0; len];
    for (i, o) in out.iter_mut().enumerate() {
        let tv = match target {
            Some(k) => {
                if i == k {
                    1.0
                } else {
                    0.0
                }
            }
            None => 1.0 / len as f64,
        };
        *o = (1.0 - t) * row[i] + t * tv;
    }
    let sum: f64 = out.iter().sum();
    for o in &mut out {
        *o /= sum;
    }
    out
}

/// Search best-achieving factors for a fixed channel and state law.
///
/// `sizes` gives the cardinalities of the free variables `u`, `ur`, `x`
/// (each 1..=3); `x_hat` is pinned to the channel's `x2` alphabet by the
/// structural identity. When no feasible factorization is found, the
/// outcome reports rate zero with a diagnostic instead of failing.
pub fn search_thm2(
    chan: &Thm2Channel,
    sizes: &BTreeMap<String, usize>,
    restarts: u32,
    seed: u64,
) -> Result<SearchOutcome> {
    chan.validate()?;
    for v in ["u", "ur", "x"] {
        match sizes.get(v) {
            Some(&n) if (1..=3).contains(&n) => {}
            Some(&n) => {
                return Err(Error::InvalidParameter {
                    name: v.into(),
                    reason: format!("searchable cardinalities are capped at 3, got {n}"),
                })
            }
            None => {
                return Err(Error::InvalidParameter {
                    name: v.into(),
                    reason: "missing cardinality".into(),
                })
            }
        }
    }
    for name in sizes.keys() {
        if !["u", "ur", "x"].contains(&name.as_str()) {
            return Err(Error::InvalidParameter {
                name: name.clone(),
                reason: "only u, ur and x are searchable".into(),
            });
        }
    }
    if restarts == 0 {
        return Err(Error::InvalidParameter {
            name: "restarts".into(),
            reason: "must be >= 1".into(),
        });
    }

    let mut alphabets = BTreeMap::new();
    for v in ["s", "x1", "y2", "y3"] {
        alphabets.insert(v.to_string(), chan.alphabets[v]);
    }
    alphabets.insert("x_hat".into(), chan.alphabets["x2"]);
    for (k, &v) in sizes {
        alphabets.insert(k.clone(), v);
    }

    let card = |v: &str| alphabets[v];
    let row_counts: [usize; FACTOR_COUNT] = [
        1,
        card("s"),
        card("u") * card("s"),
        card("ur") * card("u") * card("s"),
        card("u") * card("s"),
        card("x"),
        card("x1") * card("x_hat") * card("s"),
    ];
    let col_counts: [usize; FACTOR_COUNT] = [
        card("s"),
        card("u"),
        card("ur"),
        card("x1"),
        card("x"),
        card("x_hat"),
        card("y2") * card("y3"),
    ];
    let atoms: u128 = THM2_VARS.iter().map(|v| card(v) as u128).product();
    if atoms > crate::pmf::MAX_ATOMS as u128 {
        return Err(Error::AlphabetTooLarge(atoms));
    }

    let ev = Evaluator::new(&alphabets);
    let q_s_table = vec![chan.q_s.table[0].clone()];
    let channel_table = reorder_channel(chan, &alphabets)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(FactorTables, Score, u32)> = None;

    for restart in 0..restarts {
        let mut tables: FactorTables = [
            q_s_table.clone(),
            (0..row_counts[1])
                .map(|_| sample_row(&mut rng, col_counts[1]))
                .collect(),
            (0..row_counts[2])
                .map(|_| sample_row(&mut rng, col_counts[2]))
                .collect(),
            (0..row_counts[3])
                .map(|_| sample_row(&mut rng, col_counts[3]))
                .collect(),
            (0..row_counts[4])
                .map(|_| sample_row(&mut rng, col_counts[4]))
                .collect(),
            (0..row_counts[5])
                .map(|_| sample_row(&mut rng, col_counts[5]))
                .collect(),
            channel_table.clone(),
        ];
        let mut current = ev.score(&tables);

        for _cycle in 0..MAX_CYCLES {
            let mut improved = false;
            for &f in &SEARCHED {
                for r in 0..row_counts[f] {
                    let base_row = tables[f][r].clone();
                    let mut best_row: Option<(Vec<f64>, Score)> = None;
                    for target in (0..col_counts[f]).map(Some).chain([None]) {
                        for &t in &STEP_LADDER {
                            let cand = pulled_row(&base_row, target, t);
                            tables[f][r] = cand.clone();
                            let s = ev.score(&tables);
                            let reference = best_row.as_ref().map(|(_, s)| s).unwrap_or(&current);
                            if s.beats(reference) {
                                best_row = Some((cand, s));
                            }
                        }
                    }
                    match best_row {
                        Some((row, s)) => {
                            tables[f][r] = row;
                            current = s;
                            improved = true;
                        }
                        None => tables[f][r] = base_row,
                    }
                }
            }
            if !improved {
                break;
            }
        }

        let replace = match &best {
            None => true,
            Some((_, s, _)) => current.beats(s),
        };
        if replace {
            best = Some((tables, current, restart));
        }
    }

    let (tables, score, best_restart) = best.expect("restarts >= 1");
    let factors = assemble_input(&alphabets, &tables);
    let report = eval_thm2(&factors)?;
    let feasible_found = score.feasible;
    Ok(SearchOutcome {
        best_rate_bits: report.rate_bits.unwrap_or(0.0),
        diagnostic: (!feasible_found).then(|| {
            format!(
                "no feasible factorization found after {restarts} restarts; returning the least-infeasible candidate (slack {:.3e})",
                score.key
            )
        }),
        report,
        factors,
        restarts,
        seed,
        best_restart,
        feasible_found,
    })
}

/// Reindex the user's channel table into the evaluation order
/// (x1, x2, s) regardless of the declared `given`/`out` orders.
fn reorder_channel(
    chan: &Thm2Channel,
    alphabets: &BTreeMap<String, usize>,
) -> Result<Vec<Vec<f64>>> {
    let card = |v: &str| alphabets[if v == "x2" { "x_hat" } else { v }];
    let given = ["x1", "x2", "s"];
    let out = ["y2", "y3"];
    let rows: usize = given.iter().map(|v| card(v)).product();
    let cols: usize = out.iter().map(|v| card(v)).product();
    let mut table = vec![vec![0.0; cols]; rows];
    // weights of each variable inside the user's declared orders
    let declared_weights = |vars: &[String]| -> BTreeMap<String, usize> {
        let mut w = 1usize;
        let mut m = BTreeMap::new();
        for v in vars.iter().rev() {
            m.insert(v.clone(), w);
            w *= card(v);
        }
        m
    };
    let gw = declared_weights(&chan.channel.given);
    let ow = declared_weights(&chan.channel.out);
    let mut digits_g = [0usize; 3];
    for (row, slot_row) in table.iter_mut().enumerate() {
        let mut rem = row;
        for i in (0..3).rev() {
            digits_g[i] = rem % card(given[i]);
            rem /= card(given[i]);
        }
        let src_row: usize = given
            .iter()
            .zip(digits_g.iter())
            .map(|(v, &d)| d * gw[*v])
            .sum();
        for (col, slot) in slot_row.iter_mut().enumerate() {
            let y2 = col / card("y3");
            let y3 = col % card("y3");
            let src_col = y2 * ow["y2"] + y3 * ow["y3"];
            *slot = chan.channel.table[src_row][src_col];
        }
    }
    Ok(table)
}

fn assemble_input(alphabets: &BTreeMap<String, usize>, tables: &FactorTables) -> Thm2Input {
    let mk = |given: &[&str], out: &[&str], table: &Vec<Vec<f64>>| CondPmf {
        given: given.iter().map(|s| s.to_string()).collect(),
        out: out.iter().map(|s| s.to_string()).collect(),
        table: table.clone(),
    };
    Thm2Input {
        alphabets: alphabets.clone(),
        q_s: mk(&[], &["s"], &tables[0]),
        p_u: mk(&["s"], &["u"], &tables[1]),
        p_ur: mk(&["u", "s"], &["ur"], &tables[2]),
        p_x1: mk(&["ur", "u", "s"], &["x1"], &tables[3]),
        p_x: mk(&["u", "s"], &["x"], &tables[4]),
        p_x_hat: mk(&["x"], &["x_hat"], &tables[5]),
        channel: mk(&["x1", "x2", "s"], &["y2", "y3"], &tables[6]),
    }
}

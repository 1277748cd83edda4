//! Exact linear algebra for absorption probabilities.
//!
//! Small blocks go through fraction-free (Bareiss) elimination on integer
//! rows; larger blocks use sparse rational elimination with a minimum-degree
//! pivot order, which keeps fill-in manageable on the sparse systems the
//! solvers produce.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use crate::game::{Game, Owner};
use crate::graph::sccs;
use crate::rational::Rational;
use crate::region::RegionSet;

/// Blocks up to this size are solved densely.
const DENSE_LIMIT: usize = 24;

/// Sparse square system `A x = b`, row by row.
#[derive(Clone, Debug, Default)]
pub struct LinearSystem {
    pub rows: Vec<Vec<(usize, Rational)>>,
    pub rhs: Vec<Rational>,
}

impl LinearSystem {
    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    /// The unique solution, or `None` if the matrix is singular.
    pub fn solve(&self) -> Option<Vec<Rational>> {
        if self.dim() <= DENSE_LIMIT {
            solve_bareiss(self)
        } else {
            solve_sparse(self)
        }
    }
}

fn dense_integer_rows(sys: &LinearSystem) -> Vec<Vec<BigInt>> {
    let n = sys.dim();
    sys.rows
        .iter()
        .zip(&sys.rhs)
        .map(|(row, b)| {
            let mut lcm = b.denom().clone();
            for (_, a) in row {
                lcm = lcm.lcm(a.denom());
            }
            let mut out = vec![BigInt::zero(); n + 1];
            for (j, a) in row {
                out[*j] += a.numer() * (&lcm / a.denom());
            }
            out[n] = b.numer() * (&lcm / b.denom());
            out
        })
        .collect()
}

/// Fraction-free Gaussian elimination followed by rational back-substitution.
pub fn solve_bareiss(sys: &LinearSystem) -> Option<Vec<Rational>> {
    let n = sys.dim();
    let mut m = dense_integer_rows(sys);
    let mut prev = BigInt::one();
    for k in 0..n {
        let p = (k..n).find(|&i| !m[i][k].is_zero())?;
        m.swap(k, p);
        for i in k + 1..n {
            // Rows with a zero in column k still need the scaling step to keep
            // the exact-division invariant.
            for j in k + 1..=n {
                let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = t / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let mut x = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = Rational::from_integer(m[i][n].clone());
        for j in i + 1..n {
            if !m[i][j].is_zero() {
                acc -= Rational::from_integer(m[i][j].clone()) * &x[j];
            }
        }
        x[i] = acc / Rational::from_integer(m[i][i].clone());
    }
    Some(x)
}

/// Sparse elimination pivoting on the diagonal in minimum-degree order.
/// Diagonal pivots are always nonzero for the nonsingular M-matrices that
/// absorption problems produce; other systems fall back to dense Bareiss.
pub fn solve_sparse(sys: &LinearSystem) -> Option<Vec<Rational>> {
    let n = sys.dim();
    let mut rows: Vec<BTreeMap<usize, Rational>> = sys
        .rows
        .iter()
        .map(|r| {
            let mut m = BTreeMap::new();
            for (j, a) in r {
                let e = m.entry(*j).or_insert_with(Rational::zero);
                *e += a;
            }
            m.retain(|_, a: &mut Rational| !a.is_zero());
            m
        })
        .collect();
    let mut rhs = sys.rhs.clone();
    // col_rows[j]: rows (not yet pivoted) holding column j.
    let mut col_rows: Vec<BTreeMap<usize, ()>> = vec![BTreeMap::new(); n];
    for (i, r) in rows.iter().enumerate() {
        for &j in r.keys() {
            col_rows[j].insert(i, ());
        }
    }
    let degree = |rows: &Vec<BTreeMap<usize, Rational>>, col_rows: &Vec<BTreeMap<usize, ()>>, c: usize| {
        (rows[c].len().saturating_sub(1)) * (col_rows[c].len().saturating_sub(1))
    };
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> =
        (0..n).map(|c| Reverse((degree(&rows, &col_rows, c), c))).collect();
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse((d, c))) = heap.pop() {
        if done[c] {
            continue;
        }
        let current = degree(&rows, &col_rows, c);
        if current != d {
            heap.push(Reverse((current, c)));
            continue;
        }
        let pivot = match rows[c].get(&c) {
            Some(p) if !p.is_zero() => p.clone(),
            _ => return solve_bareiss(sys),
        };
        done[c] = true;
        order.push(c);
        for &j in rows[c].keys() {
            col_rows[j].remove(&c);
        }
        let targets: Vec<usize> = col_rows[c].keys().copied().collect();
        let pivot_row: Vec<(usize, Rational)> = rows[c]
            .iter()
            .filter(|(j, _)| **j != c)
            .map(|(j, a)| (*j, a.clone()))
            .collect();
        let pivot_rhs = rhs[c].clone();
        let mut touched = Vec::new();
        for i in targets {
            let factor = rows[i].remove(&c).expect("indexed") / &pivot;
            col_rows[c].remove(&i);
            for (j, a) in &pivot_row {
                let delta = &factor * a;
                let entry = rows[i].entry(*j).or_insert_with(Rational::zero);
                *entry -= delta;
                if entry.is_zero() {
                    rows[i].remove(j);
                    col_rows[*j].remove(&i);
                } else {
                    col_rows[*j].insert(i, ());
                }
                touched.push(*j);
            }
            rhs[i] -= &factor * &pivot_rhs;
            touched.push(i);
        }
        touched.sort_unstable();
        touched.dedup();
        for j in touched {
            if !done[j] {
                heap.push(Reverse((degree(&rows, &col_rows, j), j)));
            }
        }
    }
    if order.len() != n {
        return solve_bareiss(sys);
    }
    let mut x = vec![Rational::zero(); n];
    for &c in order.iter().rev() {
        let mut acc = rhs[c].clone();
        for (j, a) in &rows[c] {
            if *j != c {
                acc -= a * &x[*j];
            }
        }
        x[c] = acc / &rows[c][&c];
    }
    Some(x)
}

/// Transition structure of a Markov chain obtained from a game by fixing, at
/// each vertex with `choice[v] = Some(w)`, the move to `w`. Vertices without a
/// choice must be random.
pub struct Chain<'a> {
    pub game: &'a Game,
    pub choice: &'a [Option<usize>],
}

impl Chain<'_> {
    pub fn for_each_step(&self, v: usize, one: &Rational, mut f: impl FnMut(usize, &Rational)) {
        match self.choice.get(v).copied().flatten() {
            Some(w) => f(w, one),
            None => {
                debug_assert_eq!(self.game.owner(v), Owner::Random, "vertex {v} lacks a choice");
                for (w, p) in self.game.edges(v) {
                    f(w, p.expect("random edge has weight"));
                }
            }
        }
    }

    pub fn push_successors(&self, v: usize, out: &mut Vec<usize>) {
        match self.choice.get(v).copied().flatten() {
            Some(w) => out.push(w),
            None => out.extend_from_slice(self.game.successors(v)),
        }
    }
}

/// Absorption values: pinned vertices keep their value, every other vertex
/// gets the expected pinned value it is absorbed into. Requires that every
/// unpinned vertex reaches a pinned one with positive probability.
pub fn absorption_values(chain: &Chain<'_>, pinned: &[Option<Rational>]) -> Vec<Rational> {
    let n = chain.game.num_vertices();
    let free = RegionSet::from_predicate(n, |v| pinned[v].is_none());
    let mut x: Vec<Option<Rational>> = pinned.to_vec();
    let one = Rational::one();
    let comps = sccs(&free, |v, out| chain.push_successors(v, out));
    let mut local = vec![usize::MAX; n];
    for comp in comps {
        if comp.len() == 1 {
            let v = comp[0];
            let mut self_p = Rational::zero();
            let mut acc = Rational::zero();
            chain.for_each_step(v, &one, |w, p| {
                if w == v {
                    self_p += p;
                } else {
                    acc += p * x[w].as_ref().expect("successor solved");
                }
            });
            let denom = Rational::one() - self_p;
            assert!(!denom.is_zero(), "vertex {v} never leaves the unpinned region");
            x[v] = Some(acc / denom);
            continue;
        }
        for (i, &v) in comp.iter().enumerate() {
            local[v] = i;
        }
        let mut sys = LinearSystem::default();
        for &v in &comp {
            let mut row: Vec<(usize, Rational)> = vec![(local[v], Rational::one())];
            let mut acc = Rational::zero();
            chain.for_each_step(v, &one, |w, p| {
                if local[w] != usize::MAX {
                    row.push((local[w], -p.clone()));
                } else {
                    acc += p * x[w].as_ref().expect("successor solved");
                }
            });
            sys.rows.push(row);
            sys.rhs.push(acc);
        }
        let sol = sys.solve().expect("absorption system is nonsingular");
        for (&v, val) in comp.iter().zip(sol) {
            x[v] = Some(val);
            local[v] = usize::MAX;
        }
    }
    x.into_iter().map(|v| v.expect("all vertices solved")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn system(rows: Vec<Vec<(usize, i64, i64)>>, rhs: Vec<(i64, i64)>) -> LinearSystem {
        LinearSystem {
            rows: rows
                .into_iter()
                .map(|r| r.into_iter().map(|(j, a, b)| (j, rat(a, b))).collect())
                .collect(),
            rhs: rhs.into_iter().map(|(a, b)| rat(a, b)).collect(),
        }
    }

    #[test]
    fn bareiss_solves_with_row_swap() {
        // y = 1/2, x + y = 3/2
        let sys = system(vec![vec![(1, 1, 1)], vec![(0, 1, 1), (1, 1, 1)]], vec![(1, 2), (3, 2)]);
        assert_eq!(solve_bareiss(&sys).unwrap(), vec![rat(1, 1), rat(1, 2)]);
        assert_eq!(solve_sparse(&sys).unwrap(), vec![rat(1, 1), rat(1, 2)]);
    }

    #[test]
    fn singular_is_detected() {
        let sys = system(
            vec![vec![(0, 1, 1), (1, 1, 1)], vec![(0, 2, 1), (1, 2, 1)]],
            vec![(1, 1), (2, 1)],
        );
        assert!(solve_bareiss(&sys).is_none());
        assert!(sys.solve().is_none());
    }

    #[test]
    fn sparse_matches_dense_on_chain_system() {
        // Random walk on a path 0..k with absorbing ends valued 0 and 1.
        let k = 40;
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for i in 0..k {
            let mut r = vec![(i, 1, 1)];
            if i > 0 {
                r.push((i - 1, -1, 3));
            }
            if i + 1 < k {
                r.push((i + 1, -2, 3));
            }
            rows.push(r);
            rhs.push(if i + 1 == k { (2, 3) } else { (0, 1) });
        }
        let sys = system(rows, rhs);
        let a = solve_bareiss(&sys).unwrap();
        let b = solve_sparse(&sys).unwrap();
        assert_eq!(a, b);
        // Gambler's ruin with p = 2/3: x_i = (1 - 2^{-(i+1)}) / (1 - 2^{-(k+1)}).
        let expect = |i: usize| {
            let num = Rational::one() - rat(1, 2).pow((i + 1) as i32);
            let den = Rational::one() - rat(1, 2).pow((k + 1) as i32);
            num / den
        };
        for (i, v) in a.iter().enumerate() {
            assert_eq!(*v, expect(i));
        }
    }
}

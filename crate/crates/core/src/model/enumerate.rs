use super::{FeasibilityModel, LinearConstraint, Sense, VarId, VarKind};

/// Exhaustive 0/1 search with activity-bound propagation. Only meant for
/// small models; it is the reference against which the semantic engine and
/// the model builder are cross-checked.
pub struct BinarySearch<'a> {
    rows: Vec<Row>,
    watches: Vec<Vec<usize>>,
    order: Vec<VarId>,
    value: Vec<i8>,
    trail: Vec<VarId>,
    pub nodes: u64,
    _model: &'a FeasibilityModel,
}

/// Row normalised to `lo <= sum a_i x_i <= hi`.
struct Row {
    terms: Vec<(i64, VarId)>,
    lo: i64,
    hi: i64,
}

impl<'a> BinarySearch<'a> {
    pub fn new(model: &'a FeasibilityModel) -> Self {
        let nvars = model.variables().len();
        let mut watches = vec![Vec::new(); nvars];
        let rows: Vec<Row> = model.constraints().iter().map(normalise).collect();
        for (r, row) in rows.iter().enumerate() {
            for &(_, v) in &row.terms {
                watches[v].push(r);
            }
        }
        // branch on source emissions first, then function entries
        let vars = model.variables();
        let s = model.source;
        let mut order: Vec<VarId> =
            (0..nvars).filter(|&v| vars[v].kind == VarKind::X && vars[v].vertex == s).collect();
        order.extend((0..nvars).filter(|&v| vars[v].kind == VarKind::Z));
        order.extend((0..nvars).filter(|&v| {
            !(vars[v].kind == VarKind::Z || vars[v].kind == VarKind::X && vars[v].vertex == s)
        }));
        BinarySearch { rows, watches, order, value: vec![-1; nvars], trail: Vec::new(), nodes: 0, _model: model }
    }

    /// First feasible assignment, if any.
    pub fn solve(&mut self) -> Option<Vec<bool>> {
        let mut found = None;
        self.run(&mut |sol| {
            found = Some(sol.to_vec());
            false
        });
        found
    }

    /// Number of feasible assignments, stopping at `limit`.
    pub fn count(&mut self, limit: usize) -> usize {
        let mut n = 0;
        self.run(&mut |_| {
            n += 1;
            n < limit
        });
        n
    }

    pub fn all_solutions(&mut self, limit: usize) -> Vec<Vec<bool>> {
        let mut out = Vec::new();
        self.run(&mut |sol| {
            out.push(sol.to_vec());
            out.len() < limit
        });
        out
    }

    /// Calls `visit` on every feasible assignment until it returns false.
    pub fn run(&mut self, visit: &mut dyn FnMut(&[bool]) -> bool) {
        self.value.iter_mut().for_each(|v| *v = -1);
        self.trail.clear();
        let all: Vec<usize> = (0..self.rows.len()).collect();
        if self.propagate(all) {
            self.dfs(0, visit);
        }
    }

    fn dfs(&mut self, start: usize, visit: &mut dyn FnMut(&[bool]) -> bool) -> bool {
        self.nodes += 1;
        let Some(pos) = (start..self.order.len()).find(|&i| self.value[self.order[i]] < 0) else {
            let sol: Vec<bool> = self.value.iter().map(|&v| v == 1).collect();
            return visit(&sol);
        };
        let var = self.order[pos];
        for val in [1i8, 0] {
            let mark = self.trail.len();
            self.assign(var, val);
            let rows = self.watches[var].clone();
            if self.propagate(rows) && !self.dfs(pos + 1, visit) {
                self.undo(mark);
                return false;
            }
            self.undo(mark);
        }
        true
    }

    fn assign(&mut self, var: VarId, val: i8) {
        self.value[var] = val;
        self.trail.push(var);
    }

    fn undo(&mut self, mark: usize) {
        for v in self.trail.drain(mark..) {
            self.value[v] = -1;
        }
    }

    fn propagate(&mut self, mut queue: Vec<usize>) -> bool {
        while let Some(r) = queue.pop() {
            let row = &self.rows[r];
            let (mut min, mut max) = (0i64, 0i64);
            for &(a, v) in &row.terms {
                match self.value[v] {
                    1 => {
                        min += a;
                        max += a;
                    }
                    0 => {}
                    _ if a > 0 => max += a,
                    _ => min += a,
                }
            }
            if min > row.hi || max < row.lo {
                return false;
            }
            let mut forced = Vec::new();
            for &(a, v) in &row.terms {
                if self.value[v] >= 0 {
                    continue;
                }
                // setting v to the value that raises the activity
                let (up, down) = if a > 0 { (1, 0) } else { (0, 1) };
                if min + a.abs() > row.hi {
                    forced.push((v, down));
                } else if max - a.abs() < row.lo {
                    forced.push((v, up));
                }
            }
            for (v, val) in forced {
                if self.value[v] < 0 {
                    self.assign(v, val);
                    queue.extend(self.watches[v].iter().copied());
                } else if self.value[v] != val {
                    return false;
                }
            }
        }
        true
    }
}

fn normalise(c: &LinearConstraint) -> Row {
    let (lo, hi) = match c.sense {
        Sense::Le => (i64::MIN / 4, c.rhs),
        Sense::Ge => (c.rhs, i64::MAX / 4),
        Sense::Eq => (c.rhs, c.rhs),
    };
    Row { terms: c.terms.clone(), lo, hi }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::{is_unambiguous, make_alphabet};
    use crate::model::{build_model, ModelOptions};
    use crate::network::{builtin_network, Builtin};

    #[test]
    fn butterfly_q2_full_space_found() {
        let n = builtin_network(&Builtin::Butterfly).unwrap();
        let a = make_alphabet(2, false).unwrap();
        let opts = ModelOptions { routing_fix: true, symmetry_break: true, ..Default::default() };
        let m = build_model(&n, &a, 4, &opts).unwrap();
        let sol = BinarySearch::new(&m).solve().expect("feasible");
        let (code, f) = m.decode(&n, &sol).unwrap();
        assert!(is_unambiguous(&n, &code, &f).unwrap().is_yes());
    }

    #[test]
    fn path_cannot_carry_three_words_over_bits() {
        let n = builtin_network(&Builtin::Combination { n: 1, k: 1 }).unwrap();
        let a = make_alphabet(2, false).unwrap();
        assert!(build_model(&n, &a, 3, &ModelOptions::default()).is_err());
        let m = build_model(&n, &a, 2, &ModelOptions::default()).unwrap();
        // two orders of the two words, two bijections at V1
        assert_eq!(BinarySearch::new(&m).count(usize::MAX), 4);
    }
}

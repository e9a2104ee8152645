//! Dancing links exact cover with a node budget.

/// Result of an exact-cover run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    /// Indices of the chosen rows, in the order they were chosen.
    Found(Vec<usize>),
    /// The whole tree was explored without a solution.
    Exhausted,
    /// The node budget ran out first.
    OutOfBudget,
}

/// An exact cover instance. Columns `0..primary` must be covered exactly
/// once; any further columns at most once.
pub struct ExactCover {
    left: Vec<usize>,
    right: Vec<usize>,
    up: Vec<usize>,
    down: Vec<usize>,
    col: Vec<usize>,
    row: Vec<usize>,
    size: Vec<usize>,
    rows: usize,
    columns: usize,
}

impl ExactCover {
    pub fn new(primary: usize, secondary: usize) -> ExactCover {
        let columns = primary + secondary;
        let header = columns;
        let n = columns + 1;
        let mut ec = ExactCover {
            left: vec![0; n],
            right: vec![0; n],
            up: (0..n).collect(),
            down: (0..n).collect(),
            col: (0..n).collect(),
            row: vec![usize::MAX; n],
            size: vec![0; columns],
            rows: 0,
            columns,
        };
        // Only primary columns are linked into the header list; secondary
        // columns are never chosen for branching.
        let mut prev = header;
        for c in 0..primary {
            ec.right[prev] = c;
            ec.left[c] = prev;
            prev = c;
        }
        ec.right[prev] = header;
        ec.left[header] = prev;
        for c in primary..columns {
            ec.left[c] = c;
            ec.right[c] = c;
        }
        ec
    }

    pub fn row_count(&self) -> usize {
        self.rows
    }

    /// Adds a row covering `cols` (distinct, in range); returns its index.
    pub fn add_row(&mut self, cols: &[usize]) -> usize {
        let r = self.rows;
        self.rows += 1;
        let first = self.left.len();
        for (k, &c) in cols.iter().enumerate() {
            assert!(c < self.columns, "column {c} out of range");
            let node = first + k;
            self.col.push(c);
            self.row.push(r);
            let above = self.up[c];
            self.up.push(above);
            self.down.push(c);
            self.down[above] = node;
            self.up[c] = node;
            self.size[c] += 1;
            let (l, rr) = if k == 0 { (node, node) } else { (node - 1, first) };
            self.left.push(l);
            self.right.push(rr);
            if k > 0 {
                self.right[node - 1] = node;
                self.left[first] = node;
            }
        }
        r
    }

    fn cover(&mut self, c: usize) {
        let (l, r) = (self.left[c], self.right[c]);
        self.right[l] = r;
        self.left[r] = l;
        let mut i = self.down[c];
        while i != c {
            let mut j = self.right[i];
            while j != i {
                let (u, d) = (self.up[j], self.down[j]);
                self.down[u] = d;
                self.up[d] = u;
                self.size[self.col[j]] -= 1;
                j = self.right[j];
            }
            i = self.down[i];
        }
    }

    fn uncover(&mut self, c: usize) {
        let mut i = self.up[c];
        while i != c {
            let mut j = self.left[i];
            while j != i {
                let (u, d) = (self.up[j], self.down[j]);
                self.down[u] = j;
                self.up[d] = j;
                self.size[self.col[j]] += 1;
                j = self.left[j];
            }
            i = self.up[i];
        }
        let (l, r) = (self.left[c], self.right[c]);
        self.right[l] = c;
        self.left[r] = c;
    }

    /// Restores the links after an early return from `solve`.
    fn unwind(&mut self, stack: &mut Vec<(usize, usize)>) {
        while let Some((c, at)) = stack.pop() {
            if at != c {
                let mut j = self.left[at];
                while j != at {
                    self.uncover(self.col[j]);
                    j = self.left[j];
                }
            }
            self.uncover(c);
        }
    }

    /// Finds one exact cover. Branches on the primary column with fewest
    /// remaining rows, lowest index first; each chosen row counts as a node.
    pub fn solve(&mut self, node_budget: u64) -> (Outcome, u64) {
        let header = self.columns;
        let mut nodes = 0u64;
        let mut chosen: Vec<usize> = Vec::new();
        // Each frame: the column being branched on and the current candidate
        // node in that column.
        let mut stack: Vec<(usize, usize)> = Vec::new();
        'descend: loop {
            if self.right[header] == header {
                let found = chosen.iter().map(|&n| self.row[n]).collect();
                self.unwind(&mut stack);
                return (Outcome::Found(found), nodes);
            }
            let mut best = self.right[header];
            let mut c = self.right[best];
            while c != header {
                if self.size[c] < self.size[best] {
                    best = c;
                }
                c = self.right[c];
            }
            self.cover(best);
            stack.push((best, best));
            // Advance the top frame to its next candidate row, backtracking
            // as needed.
            loop {
                let Some(&mut (c, ref mut at)) = stack.last_mut() else {
                    return (Outcome::Exhausted, nodes);
                };
                if *at != c {
                    let mut j = self.left[*at];
                    while j != *at {
                        self.uncover(self.col[j]);
                        j = self.left[j];
                    }
                    chosen.pop();
                }
                *at = self.down[*at];
                let node = *at;
                if node == c {
                    self.uncover(c);
                    stack.pop();
                    if stack.is_empty() {
                        return (Outcome::Exhausted, nodes);
                    }
                    continue;
                }
                nodes += 1;
                if nodes > node_budget {
                    // The previous row of this frame is already undone and
                    // `node` is not chosen yet.
                    *at = c;
                    self.unwind(&mut stack);
                    return (Outcome::OutOfBudget, nodes);
                }
                chosen.push(node);
                let mut j = self.right[node];
                while j != node {
                    self.cover(self.col[j]);
                    j = self.right[j];
                }
                continue 'descend;
            }
        }
    }
}

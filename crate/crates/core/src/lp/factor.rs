//! Basis factorization for the revised simplex.
//!
//! A basis mixes structural columns with the logicals of some rows. Rows
//! whose logical is basic are solved for directly, so only the square block
//! of structural columns on the remaining rows (the kernel) is inverted.
//! Pivots since the last factorization are kept as eta vectors.

use crate::lp::model::LpModel;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Var {
    Col(usize),
    Row(usize),
}

#[derive(Debug, Clone)]
struct Eta<S> {
    pos: usize,
    pivot: S,
    others: Vec<(usize, S)>,
}

/// Kernel columns without a pivot, as basis positions, and the kernel rows
/// left uncovered; pairing them up gives a nonsingular basis.
#[derive(Debug, Clone)]
pub(crate) struct Singular {
    pub dependent: Vec<usize>,
    pub free_rows: Vec<usize>,
}

#[derive(Debug, Clone)]
pub(crate) struct Factor<S> {
    m: usize,
    /// Basis positions of the structural columns, in kernel order.
    kcols: Vec<usize>,
    /// Rows without a basic logical, in kernel order.
    krows: Vec<usize>,
    /// Basis position of each row's logical, if basic.
    logical_pos: Vec<Option<usize>>,
    /// Entries of the kernel columns on rows with a basic logical.
    outer: Vec<Vec<(usize, S)>>,
    /// Kernel inverse, indexed `[kernel column][kernel row]`.
    kinv: Vec<Vec<S>>,
    /// Its transpose.
    kinv_t: Vec<Vec<S>>,
    etas: Vec<Eta<S>>,
}

impl<S> Default for Factor<S> {
    fn default() -> Self {
        Self {
            m: 0,
            kcols: Vec::new(),
            krows: Vec::new(),
            logical_pos: Vec::new(),
            outer: Vec::new(),
            kinv: Vec::new(),
            kinv_t: Vec::new(),
            etas: Vec::new(),
        }
    }
}

impl<S: Scalar> Factor<S> {
    pub fn new(model: &LpModel<S>, basis: &[Var]) -> Result<Self, Singular> {
        let m = basis.len();
        let mut logical_pos = vec![None; m];
        let mut kcols = Vec::new();
        for (p, v) in basis.iter().enumerate() {
            match *v {
                Var::Row(i) => logical_pos[i] = Some(p),
                Var::Col(_) => kcols.push(p),
            }
        }
        let krows: Vec<usize> = (0..m).filter(|&i| logical_pos[i].is_none()).collect();
        let k = krows.len();
        debug_assert_eq!(k, kcols.len());
        let mut kindex = vec![usize::MAX; m];
        for (r, &i) in krows.iter().enumerate() {
            kindex[i] = r;
        }

        let mut a = vec![vec![S::zero(); 2 * k]; k];
        let mut outer = Vec::with_capacity(k);
        for (c, &p) in kcols.iter().enumerate() {
            let Var::Col(j) = basis[p] else {
                unreachable!()
            };
            let mut out = Vec::new();
            for (i, v) in model.column(j).entries() {
                if kindex[*i] == usize::MAX {
                    out.push((*i, v.clone()));
                } else {
                    a[kindex[*i]][c] = v.clone();
                }
            }
            outer.push(out);
        }
        for (r, row) in a.iter_mut().enumerate() {
            row[k + r] = S::one();
        }

        // Gauss-Jordan with partial pivoting; `row_of[r]` is the kernel row
        // now stored at `r`.
        let mut row_of: Vec<usize> = (0..k).collect();
        let mut pivot_col = Vec::with_capacity(k);
        let mut dependent = Vec::new();
        let mut r = 0;
        for col in 0..k {
            let mut best = r;
            for q in r + 1..k {
                if a[q][col].abs() > a[best][col].abs() {
                    best = q;
                }
            }
            if best >= k || a[best][col].is_zero() || a[best][col].abs() <= S::pivot_tol() {
                dependent.push(kcols[col]);
                continue;
            }
            a.swap(r, best);
            row_of.swap(r, best);
            let piv = a[r][col].clone();
            for x in a[r].iter_mut() {
                if !x.is_zero() {
                    *x = x.clone() / piv.clone();
                }
            }
            let nz: Vec<(usize, S)> = a[r]
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(t, x)| (t, x.clone()))
                .collect();
            for (q, row) in a.iter_mut().enumerate() {
                if q == r || row[col].is_zero() {
                    continue;
                }
                let f = row[col].clone();
                for (t, x) in &nz {
                    row[*t] = row[*t].clone() - f.clone() * x.clone();
                }
            }
            pivot_col.push(col);
            r += 1;
        }
        if !dependent.is_empty() {
            return Err(Singular {
                dependent,
                free_rows: row_of[r..].iter().map(|&q| krows[q]).collect(),
            });
        }
        // Row r of the eliminated block is the inverse row of kernel column
        // pivot_col[r].
        let mut kinv = vec![Vec::new(); k];
        for (r, row) in a.into_iter().enumerate() {
            kinv[pivot_col[r]] = row[k..].to_vec();
        }
        let mut kinv_t = vec![vec![S::zero(); k]; k];
        for (c, row) in kinv.iter().enumerate() {
            for (r, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    kinv_t[r][c] = v.clone();
                }
            }
        }
        Ok(Self {
            m,
            kcols,
            krows,
            logical_pos,
            outer,
            kinv,
            kinv_t,
            etas: Vec::new(),
        })
    }

    /// Solves `B x = rhs`; `rhs` is indexed by row, `x` by basis position.
    pub fn ftran(&self, rhs: &[S]) -> Vec<S> {
        let k = self.krows.len();
        let mut xs = vec![S::zero(); k];
        for (r, &i) in self.krows.iter().enumerate() {
            let b = &rhs[i];
            if b.is_zero() {
                continue;
            }
            for (x, v) in xs.iter_mut().zip(&self.kinv_t[r]) {
                if !v.is_zero() {
                    *x = x.clone() + v.clone() * b.clone();
                }
            }
        }
        let mut acc: Vec<S> = vec![S::zero(); self.m];
        for (c, v) in xs.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            for (i, a) in &self.outer[c] {
                acc[*i] = acc[*i].clone() + a.clone() * v.clone();
            }
        }
        let mut x = vec![S::zero(); self.m];
        for (c, v) in xs.into_iter().enumerate() {
            x[self.kcols[c]] = v;
        }
        for (i, pos) in self.logical_pos.iter().enumerate() {
            if let Some(p) = *pos {
                x[p] = acc[i].clone() - rhs[i].clone();
            }
        }
        for eta in &self.etas {
            if x[eta.pos].is_zero() {
                continue;
            }
            let xp = x[eta.pos].clone() / eta.pivot.clone();
            for (q, a) in &eta.others {
                x[*q] = x[*q].clone() - a.clone() * xp.clone();
            }
            x[eta.pos] = xp;
        }
        x
    }

    /// Solves `y B = c`; `c` is indexed by basis position, `y` by row.
    pub fn btran(&self, c: &[S]) -> Vec<S> {
        let mut w = c.to_vec();
        for eta in self.etas.iter().rev() {
            let mut v = w[eta.pos].clone();
            for (q, a) in &eta.others {
                if !w[*q].is_zero() {
                    v = v - w[*q].clone() * a.clone();
                }
            }
            w[eta.pos] = v / eta.pivot.clone();
        }
        let mut y = vec![S::zero(); self.m];
        for (i, pos) in self.logical_pos.iter().enumerate() {
            if let Some(p) = *pos {
                y[i] = -w[p].clone();
            }
        }
        for (c, &p) in self.kcols.iter().enumerate() {
            let mut d = w[p].clone();
            for (i, a) in &self.outer[c] {
                if !y[*i].is_zero() {
                    d = d - y[*i].clone() * a.clone();
                }
            }
            if d.is_zero() {
                continue;
            }
            for (r, v) in self.kinv[c].iter().enumerate() {
                if !v.is_zero() {
                    let i = self.krows[r];
                    y[i] = y[i].clone() + d.clone() * v.clone();
                }
            }
        }
        y
    }

    /// Records the pivot that replaces basis position `pos` by the variable
    /// whose column image is `alpha`.
    pub fn update(&mut self, pos: usize, alpha: &[S]) {
        let others = alpha
            .iter()
            .enumerate()
            .filter(|(q, a)| *q != pos && !a.is_zero())
            .map(|(q, a)| (q, a.clone()))
            .collect();
        self.etas.push(Eta {
            pos,
            pivot: alpha[pos].clone(),
            others,
        });
    }
}

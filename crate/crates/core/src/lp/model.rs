use std::fmt;

use crate::lp::LpError;
use crate::scalar::Scalar;

pub type ColumnId = usize;
pub type RowId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column<S> {
    pub name: String,
    pub obj: S,
    /// `None` is minus infinity.
    pub lower: Option<S>,
    /// `None` is plus infinity.
    pub upper: Option<S>,
    pub(crate) entries: Vec<(RowId, S)>,
}

impl<S> Column<S> {
    pub fn entries(&self) -> &[(RowId, S)] {
        &self.entries
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row<S> {
    pub name: String,
    pub sense: Sense,
    pub rhs: S,
    pub(crate) entries: Vec<(ColumnId, S)>,
}

impl<S> Row<S> {
    pub fn entries(&self) -> &[(ColumnId, S)] {
        &self.entries
    }
}

/// Minimization LP in row/column form. Rows and columns are append-only;
/// bounds and objective coefficients may change between solves.
#[derive(Debug, Clone, PartialEq)]
pub struct LpModel<S> {
    columns: Vec<Column<S>>,
    rows: Vec<Row<S>>,
}

impl<S: Scalar> Default for LpModel<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> LpModel<S> {
    pub fn new() -> Self {
        Self {
            columns: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn column(&self, id: ColumnId) -> &Column<S> {
        &self.columns[id]
    }

    pub fn row(&self, id: RowId) -> &Row<S> {
        &self.rows[id]
    }

    pub fn columns(&self) -> &[Column<S>] {
        &self.columns
    }

    pub fn rows(&self) -> &[Row<S>] {
        &self.rows
    }

    /// Adds a column with coefficients in existing rows.
    pub fn add_column(
        &mut self,
        name: impl Into<String>,
        obj: S,
        lower: Option<S>,
        upper: Option<S>,
        row_coefs: &[(RowId, S)],
    ) -> Result<ColumnId, LpError> {
        check_bounds(&lower, &upper)?;
        let id = self.columns.len();
        let mut entries = Vec::with_capacity(row_coefs.len());
        for (row, coef) in row_coefs {
            if *row >= self.rows.len() {
                return Err(LpError::BadReference);
            }
            if coef.is_zero() {
                continue;
            }
            entries.push((*row, coef.clone()));
        }
        for (row, coef) in &entries {
            self.rows[*row].entries.push((id, coef.clone()));
        }
        self.columns.push(Column {
            name: name.into(),
            obj,
            lower,
            upper,
            entries,
        });
        Ok(id)
    }

    /// Adds a row over existing columns.
    pub fn add_row(
        &mut self,
        name: impl Into<String>,
        coefs: &[(ColumnId, S)],
        sense: Sense,
        rhs: S,
    ) -> Result<RowId, LpError> {
        let id = self.rows.len();
        let mut entries: Vec<(ColumnId, S)> = Vec::with_capacity(coefs.len());
        for (col, coef) in coefs {
            if *col >= self.columns.len() {
                return Err(LpError::BadReference);
            }
            if coef.is_zero() {
                continue;
            }
            match entries.iter_mut().find(|(c, _)| c == col) {
                Some((_, existing)) => *existing = existing.clone() + coef.clone(),
                None => entries.push((*col, coef.clone())),
            }
        }
        entries.retain(|(_, c)| !c.is_zero());
        for (col, coef) in &entries {
            self.columns[*col].entries.push((id, coef.clone()));
        }
        self.rows.push(Row {
            name: name.into(),
            sense,
            rhs,
            entries,
        });
        Ok(id)
    }

    pub fn set_bounds(
        &mut self,
        col: ColumnId,
        lower: Option<S>,
        upper: Option<S>,
    ) -> Result<(), LpError> {
        check_bounds(&lower, &upper)?;
        let c = self.columns.get_mut(col).ok_or(LpError::BadReference)?;
        c.lower = lower;
        c.upper = upper;
        Ok(())
    }

    pub fn set_objective(&mut self, col: ColumnId, obj: S) -> Result<(), LpError> {
        self.columns.get_mut(col).ok_or(LpError::BadReference)?.obj = obj;
        Ok(())
    }

    /// Value of `sum coef * x` for row `row`.
    pub fn row_activity(&self, row: RowId, x: &[S]) -> S {
        self.rows[row]
            .entries
            .iter()
            .fold(S::zero(), |acc, (c, v)| acc + v.clone() * x[*c].clone())
    }

    pub fn objective_value(&self, x: &[S]) -> S {
        self.columns
            .iter()
            .zip(x)
            .fold(S::zero(), |acc, (c, v)| acc + c.obj.clone() * v.clone())
    }

    /// Largest bound or row violation of `x`.
    pub fn max_violation(&self, x: &[S]) -> S {
        let mut worst = S::zero();
        for (j, col) in self.columns.iter().enumerate() {
            if let Some(lb) = &col.lower {
                worst = S::max_of(worst, lb.clone() - x[j].clone());
            }
            if let Some(ub) = &col.upper {
                worst = S::max_of(worst, x[j].clone() - ub.clone());
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            let act = self.row_activity(i, x);
            let v = match row.sense {
                Sense::Le => act - row.rhs.clone(),
                Sense::Ge => row.rhs.clone() - act,
                Sense::Eq => (act - row.rhs.clone()).abs(),
            };
            worst = S::max_of(worst, v);
        }
        worst
    }

    /// Plain-text rendering in CPLEX LP style.
    pub fn to_lp_string(&self) -> String {
        use std::fmt::Write;
        let term = |out: &mut String, coef: &S, name: &str, first: bool| {
            let negative = coef.is_negative();
            let mag = coef.abs();
            let sign = match (first, negative) {
                (true, false) => "",
                (true, true) => "- ",
                (false, false) => " + ",
                (false, true) => " - ",
            };
            if mag.is_one() {
                let _ = write!(out, "{sign}{name}");
            } else {
                let _ = write!(out, "{sign}{mag} {name}");
            }
        };
        let mut out = String::from("Minimize\n obj: ");
        let mut first = true;
        for col in &self.columns {
            if !col.obj.is_zero() {
                term(&mut out, &col.obj, &col.name, first);
                first = false;
            }
        }
        if first {
            out.push('0');
        }
        out.push_str("\nSubject To\n");
        for row in &self.rows {
            let _ = write!(out, " {}: ", row.name);
            let mut first = true;
            for (c, v) in &row.entries {
                term(&mut out, v, &self.columns[*c].name, first);
                first = false;
            }
            if first {
                out.push('0');
            }
            let _ = writeln!(out, " {} {}", row.sense, row.rhs);
        }
        out.push_str("Bounds\n");
        for col in &self.columns {
            match (&col.lower, &col.upper) {
                (None, None) => {
                    let _ = writeln!(out, " {} free", col.name);
                }
                (Some(l), None) => {
                    let _ = writeln!(out, " {} >= {}", col.name, l);
                }
                (None, Some(u)) => {
                    let _ = writeln!(out, " -inf <= {} <= {}", col.name, u);
                }
                (Some(l), Some(u)) => {
                    let _ = writeln!(out, " {} <= {} <= {}", l, col.name, u);
                }
            }
        }
        out.push_str("End\n");
        out
    }
}

fn check_bounds<S: Scalar>(lower: &Option<S>, upper: &Option<S>) -> Result<(), LpError> {
    if let (Some(l), Some(u)) = (lower, upper) {
        if l > u {
            return Err(LpError::InconsistentBounds);
        }
    }
    Ok(())
}

//! Deterministic CSV emission.

/// Significant digits of every emitted number.
pub const SIG_DIGITS: usize = 12;

/// `%.12g`-style formatting with `-0` folded to `0`.
pub fn fmt_num(x: f64) -> String {
    fmt_sig(x, SIG_DIGITS)
}

pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let p = digits.max(1);
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Cell contents.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

fn render(cell: &Cell) -> String {
    match cell {
        Cell::Num(x) => fmt_num(*x),
        Cell::Empty => String::new(),
        Cell::Text(s) => s.replace('\n', " "),
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width must match header");
        self.rows.push(row);
    }

    /// Numeric column by name; non-numbers read as NaN.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match r[j] {
                    Cell::Num(x) => x,
                    _ => f64::NAN,
                })
                .collect(),
        )
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(render)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 cells")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn general_format() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(-2.25), "-2.25");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(0.30901699437494745), "0.309016994375");
        assert_eq!(fmt_num(123456.0), "123456");
        assert_eq!(fmt_num(1e-7), "1e-07");
        assert_eq!(fmt_num(1.5e-5), "1.5e-05");
        assert_eq!(fmt_num(1e-4), "0.0001");
        assert_eq!(fmt_num(1e12), "1e+12");
        assert_eq!(fmt_num(999999999999.0), "999999999999");
        assert_eq!(fmt_num(f64::NAN), "nan");
    }

    #[test]
    fn rounding_carries_into_exponent() {
        assert_eq!(fmt_num(9.9999999999999e-6), "1e-05");
        assert_eq!(fmt_sig(0.99999, 3), "1");
    }

    #[test]
    fn table_output() {
        let mut t = Table::new(["a", "b", "note"]);
        t.push(vec![0.1.into(), Cell::Empty, "x, y".into()]);
        t.push(vec![2.0.into(), Some(3.0).into(), "ok".into()]);
        assert_eq!(t.to_csv(), "a,b,note\n0.1,,\"x, y\"\n2,3,ok\n");
        assert_eq!(t.column("b").unwrap()[1], 3.0);
        assert!(t.column("b").unwrap()[0].is_nan());
    }
}

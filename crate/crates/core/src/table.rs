//! Text rendering of found primes: serial number, index, value, digit count.

use serde::Serialize;

use crate::candidate::Candidate;
use crate::digits::exact_digit_count;
use crate::search::{run_search, SearchConfig, SearchError};

/// Values longer than this many digits are shown abbreviated.
pub const FULL_DISPLAY_DIGITS: usize = 40;
const HEAD_DIGITS: usize = 20;
const TAIL_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub serial: u64,
    pub n: u64,
    /// Full decimal value, or first 20 digits + `..` + last 12 digits.
    #[serde(rename = "p")]
    pub p_display: String,
    pub digits: u64,
}

impl TableRow {
    pub fn new(serial: u64, c: &Candidate) -> Self {
        Self {
            serial,
            n: c.n(),
            p_display: abbreviate(&c.p().to_str_radix(10)),
            digits: exact_digit_count(c),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("row serializes")
    }
}

pub fn abbreviate(decimal: &str) -> String {
    if decimal.len() <= FULL_DISPLAY_DIGITS {
        decimal.to_owned()
    } else {
        format!(
            "{}..{}",
            &decimal[..HEAD_DIGITS],
            &decimal[decimal.len() - TAIL_DIGITS..]
        )
    }
}

/// Searches `[1, max_n]` and returns one row per certified prime.
pub fn prime_table(max_n: u64, config: &SearchConfig) -> Result<Vec<TableRow>, SearchError> {
    let records = run_search(1, max_n, config)?;
    Ok(records
        .iter()
        .filter(|r| r.is_prime())
        .zip(1..)
        .map(|(r, serial)| {
            let cert = r.certificate.as_ref().expect("certified record carries its certificate");
            TableRow {
                serial,
                n: r.n,
                p_display: abbreviate(&cert.p.to_str_radix(10)),
                digits: r.digits,
            }
        })
        .collect())
}

/// Fixed-width text table with a header line; every line ends in `\n`.
pub fn render_table(rows: &[TableRow]) -> String {
    let header = ["S.No.", "n", "p", "digits"];
    let cells: Vec<[String; 4]> = rows
        .iter()
        .map(|r| [r.serial.to_string(), r.n.to_string(), r.p_display.clone(), r.digits.to_string()])
        .collect();
    let mut widths = header.map(str::len);
    for row in &cells {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |c: [&str; 4]| {
        format!(
            "{:>w0$}  {:>w1$}  {:<w2$}  {:>w3$}\n",
            c[0],
            c[1],
            c[2],
            c[3],
            w0 = widths[0],
            w1 = widths[1],
            w2 = widths[2],
            w3 = widths[3]
        )
    };
    let mut out = line(header);
    for row in &cells {
        out.push_str(&line([&row[0], &row[1], &row[2], &row[3]]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::candidate::candidate_value;

    #[test]
    fn abbreviation_rule() {
        let forty = "1".repeat(40);
        assert_eq!(abbreviate(&forty), forty);
        let long: String = (0..41).map(|i| char::from(b'0' + (i % 10) as u8)).collect();
        assert_eq!(abbreviate(&long), "01234567890123456789..901234567890");
    }

    #[test]
    fn large_rows_match_published_prefix() {
        let row = TableRow::new(16, &candidate_value(251).unwrap());
        assert_eq!(row.digits, 500);
        assert_eq!(row.p_display, "25662820338985371726..000000000001");
        let row = TableRow::new(17, &candidate_value(374).unwrap());
        assert_eq!(row.digits, 807);
        assert!(row.p_display.starts_with("22873802587990440054.."));
    }

    #[test]
    fn renders_single_row() {
        let rows = prime_table(1, &SearchConfig::default()).unwrap();
        assert_eq!(rows, vec![TableRow { serial: 1, n: 1, p_display: "2".into(), digits: 1 }]);
        assert_eq!(render_table(&rows), "S.No.  n  p  digits\n    1  1  2       1\n");
        assert_eq!(rows[0].to_json(), r#"{"serial":1,"n":1,"p":"2","digits":1}"#);
    }
}

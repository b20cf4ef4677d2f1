//! CSV helpers shared by exports.

use std::io::Write;

use crate::error::Result;

/// 17 significant digits, scientific notation; round-trips every f64.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a header and rows of numbers.
pub fn write_rows<W: Write>(mut w: W, header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    writeln!(w, "{header}")?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|&v| fmt_num(v)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for &x in &[0.1, -1.0 / 3.0, 6.02214076e23, 5e-324, 0.0] {
            assert_eq!(fmt_num(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
        assert_eq!(fmt_num(1.0), "1.0000000000000000e0");
    }
}

//! Shared formatting for text and structured reports.

use dirac_core::ideal::IdealDecomposition;
use dirac_core::poly::format_rational_fraction;
use dirac_core::{PhasePolynomial, Rational};
use serde_json::{json, Value};

/// A polynomial for structured output: constants as `"n/d"`, everything else
/// in canonical expression form. Both re-parse with the expression grammar.
pub fn poly_value(f: &PhasePolynomial) -> Value {
    Value::String(poly_string(f))
}

pub fn poly_string(f: &PhasePolynomial) -> String {
    match f.as_constant() {
        Some(c) => format_rational_fraction(&c),
        None => f.to_string(),
    }
}

pub fn rational_value(r: &Rational) -> Value {
    Value::String(format_rational_fraction(r))
}

/// `(c1)*name1 + (c2)*name2`, skipping zero coefficients; `0` if empty.
pub fn combination(coefficients: &[PhasePolynomial], names: &[String]) -> String {
    let terms: Vec<String> = coefficients
        .iter()
        .zip(names)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, n)| format!("({c})*{n}"))
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

pub fn certificate_value(cert: &IdealDecomposition, names: &[String]) -> Value {
    let coefficients: Vec<Value> = cert
        .coefficients
        .iter()
        .zip(names)
        .map(|(c, n)| json!({ "generator": n, "coefficient": poly_value(c) }))
        .collect();
    json!({
        "mode": cert.mode.to_string(),
        "degree_bound": cert.degree_bound,
        "coefficients": coefficients,
    })
}

/// Green/red status words when color is on.
#[derive(Debug, Clone, Copy)]
pub struct Style {
    pub color: bool,
}

impl Style {
    pub fn good(&self, text: &str) -> String {
        self.paint("32", text)
    }

    pub fn bad(&self, text: &str) -> String {
        self.paint("31", text)
    }

    pub fn warn(&self, text: &str) -> String {
        self.paint("33", text)
    }

    pub fn verdict(&self, ok: bool, text: &str) -> String {
        if ok {
            self.good(text)
        } else {
            self.bad(text)
        }
    }

    fn paint(&self, code: &str, text: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }
}

/// Left-aligned text table with a header row.
pub fn table(header: &[String], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let mut s = String::from("   ");
        for (i, cell) in cells.iter().enumerate().take(cols) {
            s.push(' ');
            s.push_str(cell);
            if i + 1 < cols {
                s.push_str(&" ".repeat(widths[i] - cell.chars().count() + 1));
            }
        }
        s.trim_end().to_string()
    };
    let mut out = vec![line(header)];
    out.extend(rows.iter().map(|r| line(r)));
    out.join("\n")
}

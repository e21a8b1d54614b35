//! Deterministic report rendering: nested key-value text, float
//! formatting stable across runs, and ket pretty-printing for traces.

use num_complex::Complex64;

use cugate::hilbert::StateVector;

/// Shortest-round-trip float formatting; exponent form outside a
/// readable magnitude window.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs();
    if (1e-4..1e6).contains(&mag) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Simple indented key-value report builder.
pub struct Report {
    lines: Vec<String>,
}

impl Report {
    pub fn new(title: &str) -> Self {
        Report {
            lines: vec![format!("{title}:")],
        }
    }

    pub fn field(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        self.lines.push(format!("  {key}: {}", value.into()));
        self
    }

    pub fn nested(&mut self, key: &str) -> &mut Self {
        self.lines.push(format!("  {key}:"));
        self
    }

    pub fn nested_field(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        self.lines.push(format!("    {key}: {}", value.into()));
        self
    }

    pub fn render(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }
}

/// Render one complex amplitude compactly: unit and imaginary-unit
/// amplitudes print as +, -, +i, -i; everything else as (a+bi).
fn fmt_amplitude(z: Complex64) -> String {
    let close = |a: f64, b: f64| (a - b).abs() < 1e-9;
    if close(z.re, 1.0) && close(z.im, 0.0) {
        "+".into()
    } else if close(z.re, -1.0) && close(z.im, 0.0) {
        "-".into()
    } else if close(z.re, 0.0) && close(z.im, 1.0) {
        "+i".into()
    } else if close(z.re, 0.0) && close(z.im, -1.0) {
        "-i".into()
    } else {
        format!("({:+.4}{:+.4}i)", z.re, z.im)
    }
}

/// Render a state as a sum of kets `amp|levels>|photons>c`, skipping
/// numerically empty amplitudes.
pub fn fmt_state(state: &StateVector) -> String {
    let layout = state.layout;
    let mut terms = Vec::new();
    for (idx, amp) in state.amplitudes.iter().enumerate() {
        if amp.norm() < 1e-10 {
            continue;
        }
        let (levels, photons) = layout.split_index(idx);
        let digits: String = levels.iter().map(|l| char::from(b'0' + l)).collect();
        terms.push(format!("{}|{}>|{}>c", fmt_amplitude(*amp), digits, photons));
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" ")
    }
}

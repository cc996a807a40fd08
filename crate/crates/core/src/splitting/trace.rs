use std::io::{self, Write};

/// One row of an iteration trace.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    pub k: usize,
    pub fpr_sq: f64,
    pub objective: Option<f64>,
    pub dist_ref: Option<f64>,
    pub gamma_k: f64,
    pub lambda_k: f64,
    pub elapsed_s: f64,
}

pub const TRACE_HEADER: &str = "k,fpr_sq,objective,dist_ref,gamma_k,lambda_k,elapsed_s";

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes the trace as CSV. Floats use Rust's shortest round-trip
/// formatting. With `timing` off the elapsed column is left empty, which keeps
/// repeated runs byte-identical.
pub fn write_trace_csv<W: Write>(out: &mut W, trace: &[TraceRecord], timing: bool) -> io::Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for r in trace {
        let elapsed = if timing { r.elapsed_s.to_string() } else { String::new() };
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.k,
            r.fpr_sq,
            opt(r.objective),
            opt(r.dist_ref),
            r.gamma_k,
            r.lambda_k,
            elapsed
        )?;
    }
    Ok(())
}

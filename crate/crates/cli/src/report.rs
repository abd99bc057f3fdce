//! Output formatting: 12-significant-digit numbers, run manifests, and
//! atomic CSV writes.

use std::io::Write;
use std::path::Path;

/// Formats with 12 significant digits, positional where readable and
/// scientific otherwise. Output is deterministic byte-for-byte.
pub fn sig12(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.11e}");
    let (_, exp) = sci.split_once('e').expect("{:e} always carries an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        sci
    }
}

/// Everything needed to reproduce a run; embedded as comment lines in every
/// output (stdout and files).
pub struct Manifest {
    pub subcommand: &'static str,
    pub scenario: String,
    pub params: Vec<(String, String)>,
    pub seed: Option<u64>,
    pub out: Option<String>,
    pub threads: String,
}

impl Manifest {
    pub fn lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("# screening v{}", env!("CARGO_PKG_VERSION")),
            format!("# subcommand: {}", self.subcommand),
            format!("# scenario: {}", self.scenario),
        ];
        if !self.params.is_empty() {
            let joined = self
                .params
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(" ");
            lines.push(format!("# params: {joined}"));
        }
        if let Some(seed) = self.seed {
            lines.push(format!("# seed: {seed}"));
        }
        if let Some(out) = &self.out {
            lines.push(format!("# out: {out}"));
        }
        lines.push(format!("# threads: {}", self.threads));
        lines
    }

    pub fn print(&self) {
        for line in self.lines() {
            println!("{line}");
        }
    }
}

/// Writes a CSV file atomically (temp file in the same directory, then
/// rename): manifest comment lines, a header row, then the records.
pub fn write_csv(
    path: &Path,
    manifest: &Manifest,
    header: &str,
    rows: impl Iterator<Item = String>,
) -> std::io::Result<()> {
    let tmp = path.with_extension("csv.tmp");
    {
        let mut file = std::io::BufWriter::new(std::fs::File::create(&tmp)?);
        for line in manifest.lines() {
            writeln!(file, "{line}")?;
        }
        writeln!(file, "{header}")?;
        for row in rows {
            writeln!(file, "{row}")?;
        }
        file.flush()?;
    }
    std::fs::rename(&tmp, path)
}

use std::io::Write;
use std::time::Instant;

use rectstack::Report;
use serde::Serialize;
use serde_json::{json, Value};

/// Outcome of one command: reports, extra data and the parameters used.
///
/// Stdout gets JSON lines only, so identical inputs give identical bytes.
/// Wall-clock timings go to the stderr summary.
pub struct RunReport {
    pub command: &'static str,
    pub parameters: Value,
    pub seed: Option<u64>,
    reports: Vec<(Report, f64)>,
    data: Vec<(String, Value)>,
    started: Instant,
}

impl RunReport {
    pub fn new(command: &'static str, parameters: Value, seed: Option<u64>) -> Self {
        Self {
            command,
            parameters,
            seed,
            reports: Vec::new(),
            data: Vec::new(),
            started: Instant::now(),
        }
    }

    /// Runs `f`, timing it, and records its report.
    pub fn timed(&mut self, f: impl FnOnce() -> rectstack::Result<Report>) -> anyhow::Result<()> {
        let t = Instant::now();
        let report = f()?;
        self.reports.push((report, t.elapsed().as_secs_f64()));
        Ok(())
    }

    pub fn push(&mut self, report: Report) {
        self.reports.push((report, 0.0));
    }

    pub fn data(&mut self, name: impl Into<String>, value: impl Serialize) -> anyhow::Result<()> {
        self.data.push((name.into(), serde_json::to_value(value)?));
        Ok(())
    }

    pub fn passed(&self) -> bool {
        self.reports.iter().all(|(r, _)| r.passed())
    }

    pub fn emit(&self, out: &mut impl Write, err: &mut impl Write) -> anyhow::Result<()> {
        for (r, _) in &self.reports {
            let line = json!({
                "command": self.command,
                "report": r.title,
                "passed": r.passed(),
                "checks": r.checks,
            });
            writeln!(out, "{line}")?;
        }
        for (name, value) in &self.data {
            writeln!(
                out,
                "{}",
                json!({ "command": self.command, "data": name, "value": value })
            )?;
        }
        let summary = json!({
            "command": self.command,
            "parameters": self.parameters,
            "seed": self.seed,
            "passed": self.passed(),
        });
        writeln!(out, "{summary}")?;

        for (r, secs) in &self.reports {
            let failed = r.failures().count();
            let tag = if failed == 0 { "ok  " } else { "FAIL" };
            writeln!(
                err,
                "{tag} {} ({} checks, {failed} failed, {secs:.3} s)",
                r.title,
                r.checks.len()
            )?;
            for c in &r.checks {
                let mark = if c.pass { "  ok  " } else { "  FAIL" };
                if c.detail.is_empty() {
                    writeln!(err, "{mark} {}", c.name)?;
                } else {
                    writeln!(err, "{mark} {}: {}", c.name, c.detail)?;
                }
            }
        }
        writeln!(
            err,
            "{}: {} in {:.3} s",
            self.command,
            if self.passed() { "passed" } else { "FAILED" },
            self.started.elapsed().as_secs_f64()
        )?;
        Ok(())
    }
}

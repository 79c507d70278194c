//! CSV output. Reals are printed with 9 significant digits; absent values
//! are empty fields.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fmt::sig;
use crate::harness::experiment::ScenarioResult;
use crate::harness::sweep::SweepEntry;
use crate::panel::PanelResult;

pub const RESULTS_HEADER: &str = "scenario,rep,tau,d_value,q,detected,first_detection";

fn real(x: f64) -> String {
    sig(x, 9)
}

fn opt_real(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

/// One row per replication and time point.
pub fn results_csv(result: &ScenarioResult, q: f64) -> String {
    let mut out = String::from(RESULTS_HEADER);
    out.push('\n');
    for rec in &result.records {
        let first = rec.first_detection.map(|f| f.to_string()).unwrap_or_default();
        for (i, d) in rec.d_values.iter().enumerate() {
            let tau = i + 1;
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                rec.scenario,
                rec.rep,
                tau,
                real(*d),
                real(q),
                u8::from(rec.detected_by(tau)),
                first
            ));
        }
    }
    out
}

/// Detection curve followed, after a blank line, by the delay summary row.
pub fn summary_csv(results: &[&ScenarioResult]) -> String {
    let mut out = String::from("scenario,tau,detect_fraction\n");
    for res in results {
        for (i, f) in res.detection_curve.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", res.scenario, i + 1, real(*f)));
        }
    }
    out.push_str("\nscenario,mean_delay,median_delay,false_alarm_frac\n");
    for res in results {
        out.push_str(&format!(
            "{},{},{},{}\n",
            res.scenario,
            opt_real(res.mean_delay),
            opt_real(res.median_delay),
            real(res.false_alarm_frac)
        ));
    }
    out
}

/// Per-member and aggregate detection curves of a panel run.
pub fn panel_csv(result: &PanelResult) -> String {
    let mut out = String::from("member,event,alpha,q,tau,detect_fraction\n");
    for (m, member) in result.members.iter().enumerate() {
        for (i, f) in member.curve.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                m,
                member.event_label,
                real(result.per_member_alpha),
                real(result.q),
                i + 1,
                real(*f)
            ));
        }
    }
    for (i, f) in result.aggregate_curve.iter().enumerate() {
        out.push_str(&format!(
            "aggregate,any,{},{},{},{}\n",
            real(result.global_alpha),
            real(result.q),
            i + 1,
            real(*f)
        ));
    }
    out
}

/// Detection curves for every sample size, then the delay-rate table.
pub fn sweep_csv(entries: &[SweepEntry], beta: f64) -> String {
    let mut out = String::from("scenario,n,tau,detect_fraction\n");
    for e in entries {
        for (i, f) in e.result.detection_curve.iter().enumerate() {
            out.push_str(&format!("{},{},{},{}\n", e.result.scenario, e.n, i + 1, real(*f)));
        }
    }
    out.push_str("\nscenario,n,mean_delay,median_delay,false_alarm_frac,scaled_delay\n");
    let exponent = crate::harness::sweep::delay_exponent(beta);
    for e in entries {
        let scaled = e.result.mean_delay.map(|d| d * (e.n as f64).powf(exponent));
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            e.result.scenario,
            e.n,
            opt_real(e.result.mean_delay),
            opt_real(e.result.median_delay),
            real(e.result.false_alarm_frac),
            opt_real(scaled)
        ));
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::monitor::RunRecord;

    fn result() -> ScenarioResult {
        let rec = |rep, first| RunRecord {
            scenario: "a".into(),
            rep,
            seed: 1,
            change_time: 2,
            d_values: vec![0.5, 1.0 / 3.0, 3.0],
            first_detection: first,
        };
        ScenarioResult {
            scenario: "a".into(),
            change_time: 2,
            harmful: true,
            detection_curve: vec![0.0, 0.0, 0.5],
            mean_delay: Some(1.0),
            median_delay: Some(1.0),
            false_alarm_frac: 0.0,
            records: vec![rec(0, Some(3)), rec(1, None)],
        }
    }

    #[test]
    fn results_layout() {
        let csv = results_csv(&result(), 2.25);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], RESULTS_HEADER);
        assert_eq!(lines[1], "a,0,1,0.5,2.25,0,3");
        assert_eq!(lines[2], "a,0,2,0.333333333,2.25,0,3");
        assert_eq!(lines[3], "a,0,3,3,2.25,1,3");
        assert_eq!(lines[4], "a,1,1,0.5,2.25,0,");
        assert_eq!(lines.len(), 7);
    }

    #[test]
    fn summary_layout() {
        let r = result();
        let mut r2 = result();
        r2.scenario = "b".into();
        r2.mean_delay = None;
        r2.median_delay = None;
        let csv = summary_csv(&[&r, &r2]);
        let expected = "scenario,tau,detect_fraction\n\
a,1,0\na,2,0\na,3,0.5\nb,1,0\nb,2,0\nb,3,0.5\n\n\
scenario,mean_delay,median_delay,false_alarm_frac\n\
a,1,1,0\nb,,,0\n";
        assert_eq!(csv, expected);
    }
}

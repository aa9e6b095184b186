//! CSV artifact writers.
//!
//! Layout is pinned for byte reproducibility: comma separator, `\n` line
//! endings, `.` decimal point, one header row, and double-quoting only
//! for fields that need it. Undefined values print as `undefined`.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::harness::ExperimentReport;
use crate::model::{Schedule, SLOT_COUNT};
use crate::money::{div_round_half_away, Money, Ri};
use crate::optim::OptimizerResult;

pub const UNDEFINED: &str = "undefined";

fn field(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

fn push_row(out: &mut String, cells: &[String]) {
    let mut first = true;
    for cell in cells {
        if !first {
            out.push(',');
        }
        out.push_str(&field(cell));
        first = false;
    }
    out.push('\n');
}

fn seed_cell(seed: Option<u64>) -> String {
    match seed {
        Some(seed) => seed.to_string(),
        None => "-".to_string(),
    }
}

/// Hundredths of a percent, rounding halves away from zero.
pub fn percent_hundredths(part: Money, whole: Money) -> i64 {
    div_round_half_away(i128::from(part.0) * 10_000, i128::from(whole.0)) as i64
}

/// Renders hundredths of a percent as a plain decimal, two digits.
pub fn percent_text(hundredths: i64) -> String {
    let magnitude = hundredths.unsigned_abs();
    let sign = if hundredths < 0 { "-" } else { "" };
    format!("{sign}{}.{:02}", magnitude / 100, magnitude % 100)
}

fn write_file(out_dir: &Path, name: &str, content: &str) -> io::Result<PathBuf> {
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join(name);
    fs::write(&path, content)?;
    Ok(path)
}

/// Per-hour costs of one run per optimizer: `hour` then `{name}_cost`.
pub fn optimize_hourly_csv(runs: &[(&str, &OptimizerResult)]) -> String {
    let mut out = String::new();
    let mut header = vec!["hour".to_string()];
    header.extend(runs.iter().map(|(name, _)| format!("{name}_cost")));
    push_row(&mut out, &header);
    for hour in 0..SLOT_COUNT {
        let mut row = vec![hour.to_string()];
        row.extend(runs.iter().map(|(_, r)| r.cost.hourly[hour].to_string()));
        push_row(&mut out, &row);
    }
    out
}

/// One row per run: total cost and the reduction against the baseline
/// total, when a baseline ran.
pub fn optimize_summary_csv(
    rows: &[(&str, Option<u64>, &OptimizerResult)],
    baseline_total: Option<Money>,
) -> String {
    let mut out = String::new();
    push_row(
        &mut out,
        &[
            "optimizer".to_string(),
            "seed".to_string(),
            "total_cost".to_string(),
            "reduction_pct".to_string(),
        ],
    );
    for &(name, seed, result) in rows {
        let reduction = match baseline_total {
            Some(base) if base.0 > 0 => {
                percent_text(percent_hundredths(Money(base.0 - result.cost.total.0), base))
            }
            _ => UNDEFINED.to_string(),
        };
        push_row(
            &mut out,
            &[
                name.to_string(),
                seed_cell(seed),
                result.cost.total.to_string(),
                reduction,
            ],
        );
    }
    out
}

/// Clean and attacked per-hour bills side by side for one report per
/// optimizer: `hour` then `{name}_clean,{name}_attacked`.
pub fn attack_hourly_csv(reports: &[(&str, &ExperimentReport)]) -> String {
    let mut out = String::new();
    let mut header = vec!["hour".to_string()];
    for (name, _) in reports {
        header.push(format!("{name}_clean"));
        header.push(format!("{name}_attacked"));
    }
    push_row(&mut out, &header);
    for hour in 0..SLOT_COUNT {
        let mut row = vec![hour.to_string()];
        for (_, report) in reports {
            row.push(report.clean.cost.hourly[hour].to_string());
            row.push(report.attacked.cost.hourly[hour].to_string());
        }
        push_row(&mut out, &row);
    }
    out
}

fn ri_cell(ri: Option<Ri>) -> String {
    match ri {
        Some(ri) => ri.to_string(),
        None => UNDEFINED.to_string(),
    }
}

/// Slotwise resilience per optimizer: `hour` then `{name}_ri`.
pub fn ri_hourly_csv(reports: &[(&str, &ExperimentReport)]) -> String {
    let mut out = String::new();
    let mut header = vec!["hour".to_string()];
    header.extend(reports.iter().map(|(name, _)| format!("{name}_ri")));
    push_row(&mut out, &header);
    for hour in 0..SLOT_COUNT {
        let mut row = vec![hour.to_string()];
        row.extend(
            reports
                .iter()
                .map(|(_, report)| ri_cell(report.ri_hourly[hour])),
        );
        push_row(&mut out, &row);
    }
    out
}

/// One row per clean-vs-attacked pair, both resilience aggregations.
pub fn attack_summary_csv(rows: &[(&str, Option<u64>, &ExperimentReport)]) -> String {
    let mut out = String::new();
    push_row(
        &mut out,
        &[
            "optimizer".to_string(),
            "seed".to_string(),
            "clean_cost".to_string(),
            "attacked_cost".to_string(),
            "ri_total".to_string(),
            "ri_hourly_mean".to_string(),
        ],
    );
    for &(name, seed, report) in rows {
        push_row(
            &mut out,
            &[
                name.to_string(),
                seed_cell(seed),
                report.clean_total().to_string(),
                report.attacked_total().to_string(),
                report.ri_total.to_string(),
                ri_cell(report.ri_hourly_mean()),
            ],
        );
    }
    out
}

/// `appliance,slots` rows in id order. Slot lists hold commas, so they
/// arrive quoted.
pub fn schedule_csv(schedule: &Schedule) -> String {
    let mut out = String::new();
    push_row(&mut out, &["appliance".to_string(), "slots".to_string()]);
    for (id, slots) in schedule.iter() {
        push_row(&mut out, &[id.to_string(), slots.to_string()]);
    }
    out
}

/// Single-row record of an exhaustive search.
pub fn oracle_summary_csv(result: &OptimizerResult, search_space: u128) -> String {
    let mut out = String::new();
    push_row(
        &mut out,
        &[
            "total_cost".to_string(),
            "evaluations".to_string(),
            "search_space".to_string(),
        ],
    );
    push_row(
        &mut out,
        &[
            result.cost.total.to_string(),
            result.evaluations.to_string(),
            search_space.to_string(),
        ],
    );
    out
}

/// Writes one artifact under `out_dir`, creating the directory on first
/// use, and returns the full path.
pub fn write_artifact(out_dir: &Path, name: &str, content: &str) -> io::Result<PathBuf> {
    write_file(out_dir, name, content)
}

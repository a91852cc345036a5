//! Fixed-format text tables for reports.
//!
//! Output is deterministic: rows are iterated in sorted order and numbers
//! are written with a fixed number of decimals.

use std::fmt::Write;

use crate::evaluation::{EvaluationReport, SweepReport};
use crate::iaa::{IaaReport, MetricValues};
use crate::model::{EntityType, TokenClass};
use crate::validation::{CorpusStatistics, CoverageReport, Ratio, ValidationFlag};

fn pct1(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_owned(), |v| format!("{:.1}", v * 100.0))
}

fn pct2(r: &Ratio) -> String {
    match r.percent() {
        Some(p) => format!("{p:.2}% ({}/{})", r.covered, r.total),
        None => format!("n/a ({}/{})", r.covered, r.total),
    }
}

pub fn flags_table(flags: &[ValidationFlag]) -> String {
    let mut out = String::new();
    for f in flags {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            f.sentence_id, f.token_position, f.inventory_id, f.annotator_id, f.rule, f.details
        );
    }
    let _ = writeln!(out, "{} flags", flags.len());
    out
}

pub fn statistics_table(stats: &CorpusStatistics) -> String {
    let mut out = String::new();
    let cols = [
        ("noun", stats.class(TokenClass::Noun)),
        ("verb", stats.class(TokenClass::Verb)),
        ("func", stats.class(TokenClass::FunctionWord)),
        ("punc+digit", stats.punct_and_digits()),
        ("total", stats.total),
    ];
    let _ = write!(out, "{:<14}", "term");
    for (name, _) in &cols {
        let _ = write!(out, "{name:>12}");
    }
    out.push('\n');
    type Column = fn(&crate::validation::ClassStats) -> usize;
    let rows: [(&str, Column); 4] = [
        ("tokens", |c| c.tokens),
        ("unique tokens", |c| c.unique_tokens),
        ("unique lemmas", |c| c.unique_lemmas),
        ("unique senses", |c| c.unique_senses),
    ];
    for (label, get) in rows {
        let _ = write!(out, "{label:<14}");
        for (_, c) in &cols {
            let _ = write!(out, "{:>12}", get(c));
        }
        out.push('\n');
    }
    out.push('\n');
    let _ = writeln!(out, "{:<14}{:>12}{:>12}", "entity", "mentions", "tokens");
    for t in EntityType::ALL {
        let e = stats.entities.get(&t).copied().unwrap_or_default();
        let _ = writeln!(out, "{:<14}{:>12}{:>12}", t.tag(), e.mentions, e.tokens);
    }
    let _ = writeln!(
        out,
        "{:<14}{:>12}{:>12}",
        "total", stats.entity_total.mentions, stats.entity_total.tokens
    );
    out
}

pub fn coverage_table(reports: &[CoverageReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<12}{:<28}{:<28}{:<28}",
        "inventory", "lemmas", "senses (no proper)", "proper-noun senses"
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{:<12}{:<28}{:<28}{:<28}",
            r.inventory_id.as_str(),
            pct2(&r.lemma_coverage),
            pct2(&r.sense_coverage_excl_proper),
            pct2(&r.proper_noun_sense_coverage)
        );
    }
    out
}

fn metric_cells(m: &MetricValues) -> [String; 5] {
    [
        format!("{:.2}", m.kappa * 100.0),
        format!("{:.2}", m.lwk * 100.0),
        format!("{:.2}", m.qwk * 100.0),
        format!("{:.2}", m.rmse),
        format!("{:.2}", m.mae),
    ]
}

/// Kappa, LWK and QWK are shown on a 0-100 scale; RMSE and MAE in score points.
pub fn iaa_table(report: &IaaReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<12}{:<16}{:>8}{:>10}{:>10}{:>10}{:>10}{:>10}",
        "inventory", "pair", "items", "kappa", "lwk", "qwk", "rmse", "mae"
    );
    for (inv, agreement) in &report.inventories {
        for p in &agreement.pairs {
            let c = metric_cells(&p.metrics);
            let _ = writeln!(
                out,
                "{:<12}{:<16}{:>8}{:>10}{:>10}{:>10}{:>10}{:>10}",
                inv.as_str(),
                format!("{},{}", p.a, p.b),
                p.paired,
                c[0],
                c[1],
                c[2],
                c[3],
                c[4]
            );
        }
        let m = metric_cells(&agreement.summary.mean);
        let s = metric_cells(&agreement.summary.std);
        let _ = writeln!(
            out,
            "{:<12}{:<16}{:>8}{:>10}{:>10}{:>10}{:>10}{:>10}",
            inv.as_str(),
            "mean",
            "",
            m[0],
            m[1],
            m[2],
            m[3],
            m[4]
        );
        let _ = writeln!(
            out,
            "{:<12}{:<16}{:>8}{:>10}{:>10}{:>10}{:>10}{:>10}",
            inv.as_str(),
            "std",
            "",
            s[0],
            s[1],
            s[2],
            s[3],
            s[4]
        );
    }
    out
}

const EVAL_HEADER: &str = "scorer                window  inventory   top1   top2   top3   noun   verb   func  evaluated  skipped";

fn evaluation_row(out: &mut String, r: &EvaluationReport) {
    let _ = writeln!(
        out,
        "{:<22}{:<8}{:<10}{:>7}{:>7}{:>7}{:>7}{:>7}{:>7}{:>11}{:>9}",
        r.scorer,
        r.config.window.to_string(),
        r.config.inventory_id.as_str(),
        pct1(r.top1),
        pct1(r.top2),
        pct1(r.top3),
        pct1(r.noun.top1),
        pct1(r.verb.top1),
        pct1(r.function_word.top1),
        r.evaluated,
        r.skipped.total()
    );
}

pub fn evaluation_table(reports: &[EvaluationReport]) -> String {
    let mut out = String::new();
    out.push_str(EVAL_HEADER);
    out.push('\n');
    for r in reports {
        evaluation_row(&mut out, r);
    }
    out
}

pub fn sweep_table(report: &SweepReport) -> String {
    let mut out = String::new();
    out.push_str(EVAL_HEADER);
    out.push('\n');
    for cell in &report.cells {
        match (&cell.report, &cell.error) {
            (Some(r), _) => evaluation_row(&mut out, r),
            (None, err) => {
                let _ = writeln!(
                    out,
                    "{:<22}{:<8}{:<10}  FAILED: {}",
                    cell.scorer,
                    cell.window.to_string(),
                    cell.inventory_id.as_str(),
                    err.as_deref().unwrap_or("unknown error")
                );
            }
        }
    }
    out
}

use serde::Serialize;

use canlift::dwork::{HDPoly, LiftReport, LIFT_CSV_COLUMNS, SCHEMA_VERSION};
use canlift::obstruction::ObstructionReport;

use crate::selftest::SelfTestResult;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize to JSON");
    s.push('\n');
    s
}

/// CSV with a fixed header, written even when there are no rows.
fn csv_rows<T: Serialize>(header: &[&str], rows: &[T]) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header).expect("write to memory");
    for r in rows {
        w.serialize(r).expect("rows serialize to CSV");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("CSV is UTF-8")
}

fn csv_records(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("write to memory");
    for r in rows {
        w.write_record(r).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("CSV is UTF-8")
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "-".to_string(), |x| x.to_string())
}

pub fn lift_single(r: &LiftReport, format: Format) -> String {
    match format {
        Format::Json => json(r),
        Format::Csv => csv_rows(&LIFT_CSV_COLUMNS, std::slice::from_ref(r)),
        Format::Text => {
            let mut s = format!("p = {}, n = {}, N = {}, lambda = {}\n", r.p, r.n, r.big_n, r.lambda);
            s += &format!("smooth:          {}\n", r.smooth);
            s += &format!("ordinary:        {}\n", r.ordinary);
            s += &format!("eta:             {}\n", opt(&r.eta_witt));
            if r.n == 1 {
                s += &format!("eta mod p^2:     {}\n", opt(&r.eta_zp2));
            }
            s += &format!("cross-checked:   {}\n", r.cross_checked);
            s += &format!("inconclusive_n2: {}\n", r.inconclusive_n2);
            s += &format!("time:            {:.3} ms\n", r.timing_ms);
            s
        }
    }
}

pub fn lift_table(rows: &[LiftReport], format: Format) -> String {
    match format {
        Format::Json => json(rows),
        Format::Csv => csv_rows(&LIFT_CSV_COLUMNS, rows),
        Format::Text => {
            let mut s = format!(
                "{:<12} {:<7} {:<9} {:<14} {:<8} {:<8} {:>10}\n",
                "lambda", "smooth", "ordinary", "eta", "eta_zp2", "checked", "ms"
            );
            for r in rows {
                s += &format!(
                    "{:<12} {:<7} {:<9} {:<14} {:<8} {:<8} {:>10.3}\n",
                    r.lambda,
                    r.smooth,
                    r.ordinary,
                    opt(&r.eta_witt),
                    opt(&r.eta_zp2),
                    r.cross_checked,
                    r.timing_ms
                );
            }
            s
        }
    }
}

const OBSTRUCTION_COLUMNS: [&str; 12] = [
    "schema_version",
    "p",
    "n_ext",
    "N",
    "d",
    "canonical",
    "inconclusive_n2",
    "kernel_rank",
    "witness",
    "setup_ms",
    "kernel_ms",
    "total_ms",
];

fn obstruction_record(r: &ObstructionReport) -> Vec<String> {
    vec![
        r.schema_version.to_string(),
        r.p.to_string(),
        r.n_ext.to_string(),
        r.n_ambient.to_string(),
        r.d.to_string(),
        r.canonical.to_string(),
        r.inconclusive_n2.to_string(),
        r.kernel_rank.to_string(),
        r.witness.clone().unwrap_or_default(),
        format!("{:.3}", r.timings_ms.setup),
        format!("{:.3}", r.timings_ms.kernel),
        format!("{:.3}", r.timings_ms.total),
    ]
}

fn obstruction_text(r: &ObstructionReport) -> String {
    let mut s = format!(
        "p = {}, n = {}, N = {}, degree {}\n",
        r.p, r.n_ext, r.n_ambient, r.d
    );
    s += &format!("canonical:       {}\n", r.canonical);
    s += &format!("inconclusive_n2: {}\n", r.inconclusive_n2);
    s += &format!("kernel rank:     {}\n", r.kernel_rank);
    if let Some(w) = &r.witness {
        s += &format!("witness:         {w}\n");
    }
    s += &format!("time:            {:.3} ms\n", r.timings_ms.total);
    s
}

pub fn obstruction(r: &ObstructionReport, format: Format) -> String {
    match format {
        Format::Json => json(r),
        Format::Csv => csv_records(&OBSTRUCTION_COLUMNS, &[obstruction_record(r)]),
        Format::Text => obstruction_text(r),
    }
}

pub const SMOOTHNESS_NOTE: &str =
    "assumes f mod p defines a smooth hypersurface; smoothness is not checked";

#[derive(Serialize)]
pub struct GammaReport {
    #[serde(flatten)]
    report: ObstructionReport,
    witness_image: Option<String>,
    precondition: &'static str,
}

impl GammaReport {
    pub fn new(report: ObstructionReport, witness_image: Option<String>) -> Self {
        GammaReport {
            report,
            witness_image,
            precondition: SMOOTHNESS_NOTE,
        }
    }
}

pub fn gamma(g: &GammaReport, format: Format) -> String {
    match format {
        Format::Json => json(g),
        Format::Csv => {
            let mut header = OBSTRUCTION_COLUMNS.to_vec();
            header.push("witness_image");
            let mut rec = obstruction_record(&g.report);
            rec.push(g.witness_image.clone().unwrap_or_default());
            csv_records(&header, &[rec])
        }
        Format::Text => {
            let mut s = obstruction_text(&g.report);
            if let Some(img) = &g.witness_image {
                s += &format!("gamma(witness):  {img}\n");
            }
            s += &format!("note: {SMOOTHNESS_NOTE}\n");
            s
        }
    }
}

#[derive(Serialize)]
pub struct HdCoefficient {
    exponent: u32,
    exact: String,
    mod_p2: u64,
}

#[derive(Serialize)]
pub struct HdReport {
    schema_version: u32,
    #[serde(rename = "M")]
    m: u32,
    #[serde(rename = "P")]
    power: u32,
    p: u64,
    exact: String,
    reduced: String,
    coefficients: Vec<HdCoefficient>,
}

impl HdReport {
    pub fn new(h: &HDPoly, p: u64) -> Self {
        let q = p * p;
        let reduced: Vec<(u32, u64)> = h.reduce_mod(q);
        let coefficients = h
            .terms()
            .map(|(e, c)| HdCoefficient {
                exponent: e,
                exact: c.to_string(),
                mod_p2: reduced.iter().find(|r| r.0 == e).map_or(0, |r| r.1),
            })
            .collect();
        HdReport {
            schema_version: SCHEMA_VERSION,
            m: h.m(),
            power: h.power(),
            p,
            exact: h.format_exact(),
            reduced: h.format_mod(q),
            coefficients,
        }
    }
}

pub fn hd(h: &HdReport, format: Format) -> String {
    match format {
        Format::Json => json(h),
        Format::Csv => {
            let rows: Vec<Vec<String>> = h
                .coefficients
                .iter()
                .map(|c| vec![c.exponent.to_string(), c.exact.clone(), c.mod_p2.to_string()])
                .collect();
            csv_records(&["exponent", "exact", "mod_p2"], &rows)
        }
        Format::Text => format!("{}\n{}\n", h.exact, h.reduced),
    }
}

pub fn selftest(results: &[SelfTestResult], format: Format) -> String {
    match format {
        Format::Json => json(results),
        Format::Csv => csv_rows(&["name", "passed", "detail"], results),
        Format::Text => {
            let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
            let mut s = String::new();
            for r in results {
                let tag = if r.passed { "PASS" } else { "FAIL" };
                s += &format!("{tag}  {:<width$}  {}\n", r.name, r.detail);
            }
            s
        }
    }
}

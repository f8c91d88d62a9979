use crate::error::{Error, Result};
use crate::io::format_significant;
use crate::scenario::LoadCurve;

/// Parses 24 `hour,mw` rows. Every malformation is reported with its line.
pub fn parse_load_curve(text: &str) -> Result<LoadCurve> {
    let text = text.replace("\r\n", "\n");
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());

    let mut seen: [Option<usize>; 24] = [None; 24];
    let mut values = [0.0; 24];
    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let bad = |message: String| Error::Parse { line, message };
        if record.iter().all(str::is_empty) {
            continue;
        }
        if std::mem::take(&mut first) && record.get(0).is_some_and(|f| f.eq_ignore_ascii_case("hour")) {
            continue;
        }
        if record.len() != 2 {
            return Err(bad(format!("expected 2 fields `hour,mw`, found {}", record.len())));
        }
        let hour: usize = record[0]
            .parse()
            .map_err(|_| bad(format!("hour `{}` is not an integer", &record[0])))?;
        if hour > 23 {
            return Err(bad(format!("hour {hour} is outside 0-23")));
        }
        let mw: f64 = record[1]
            .parse()
            .map_err(|_| bad(format!("demand `{}` is not a number", &record[1])))?;
        if !mw.is_finite() {
            return Err(bad(format!("demand `{}` is not finite", &record[1])));
        }
        if mw < 0.0 {
            return Err(bad(format!("negative demand {mw} for hour {hour}")));
        }
        if let Some(prev) = seen[hour] {
            return Err(bad(format!("duplicate hour {hour} (first given on line {prev})")));
        }
        seen[hour] = Some(line);
        values[hour] = mw;
    }
    let missing: Vec<String> = (0..24).filter(|&h| seen[h].is_none()).map(|h| h.to_string()).collect();
    if !missing.is_empty() {
        return Err(Error::Config(format!(
            "load curve is missing hour(s) {}",
            missing.join(", ")
        )));
    }
    LoadCurve::new(values.to_vec())
}

pub fn write_load_curve(curve: &LoadCurve) -> String {
    let mut out = String::from("hour,mw\n");
    for (h, v) in curve.hourly().iter().enumerate() {
        out.push_str(&format!("{h},{}\n", format_significant(*v, 17)));
    }
    out
}

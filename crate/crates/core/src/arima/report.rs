//! Plain-text model reports: one key/value block per fitted model,
//! blank-line separated, numbers in full-precision decimal notation so a
//! parsed report reproduces the model bit for bit.

use std::io::{self, Write};

use crate::arima::{classify, ArimaError, ArimaModel, ArimaOrder};
use crate::country::CountryCode;

/// One model in a report, optionally keyed by the country it was fitted to.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelReportEntry {
    pub country: Option<CountryCode>,
    pub model: ArimaModel,
}

fn join_coefficients(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Writes entries as blocks of `key: value` lines.
///
/// Fields per block: optional `country`, then `order`, `ar`, `ma`,
/// `constant`, `sigma2`, `css`, `aicc`, `n_effective`, `category`.
pub fn write_model_report<W: Write>(mut w: W, entries: &[ModelReportEntry]) -> io::Result<()> {
    for (i, entry) in entries.iter().enumerate() {
        if i > 0 {
            writeln!(w)?;
        }
        if let Some(country) = &entry.country {
            writeln!(w, "country: {country}")?;
        }
        let model = &entry.model;
        writeln!(w, "order: {}", model.order)?;
        writeln!(w, "ar: {}", join_coefficients(&model.ar_coefficients))?;
        writeln!(w, "ma: {}", join_coefficients(&model.ma_coefficients))?;
        writeln!(w, "constant: {}", model.constant)?;
        writeln!(w, "sigma2: {}", model.sigma2)?;
        writeln!(w, "css: {}", model.css)?;
        writeln!(w, "aicc: {}", model.aicc)?;
        writeln!(w, "n_effective: {}", model.n_effective)?;
        writeln!(w, "category: {}", model.category())?;
    }
    Ok(())
}

struct BlockParser<'a> {
    country: Option<CountryCode>,
    order: Option<ArimaOrder>,
    ar: Option<Vec<f64>>,
    ma: Option<Vec<f64>>,
    constant: Option<f64>,
    sigma2: Option<f64>,
    css: Option<f64>,
    aicc: Option<f64>,
    n_effective: Option<usize>,
    category: Option<&'a str>,
    first_line: usize,
}

impl<'a> BlockParser<'a> {
    fn new(first_line: usize) -> Self {
        Self {
            country: None,
            order: None,
            ar: None,
            ma: None,
            constant: None,
            sigma2: None,
            css: None,
            aicc: None,
            n_effective: None,
            category: None,
            first_line,
        }
    }

    fn is_empty(&self) -> bool {
        self.country.is_none()
            && self.order.is_none()
            && self.ar.is_none()
            && self.ma.is_none()
            && self.constant.is_none()
            && self.sigma2.is_none()
            && self.css.is_none()
            && self.aicc.is_none()
            && self.n_effective.is_none()
            && self.category.is_none()
    }

    fn finish(self) -> Result<ModelReportEntry, ArimaError> {
        let line = self.first_line;
        let missing = |field: &str| ArimaError::ReportParse {
            line,
            message: format!("missing field `{field}`"),
        };
        let order = self.order.ok_or_else(|| missing("order"))?;
        let ar = self.ar.ok_or_else(|| missing("ar"))?;
        let ma = self.ma.ok_or_else(|| missing("ma"))?;
        if ar.len() != order.p || ma.len() != order.q {
            return Err(ArimaError::ReportParse {
                line,
                message: format!(
                    "coefficient counts ({}, {}) do not match order {order}",
                    ar.len(),
                    ma.len()
                ),
            });
        }
        let model = ArimaModel {
            order,
            ar_coefficients: ar,
            ma_coefficients: ma,
            constant: self.constant.ok_or_else(|| missing("constant"))?,
            sigma2: self.sigma2.ok_or_else(|| missing("sigma2"))?,
            css: self.css.ok_or_else(|| missing("css"))?,
            aicc: self.aicc.ok_or_else(|| missing("aicc"))?,
            n_effective: self.n_effective.ok_or_else(|| missing("n_effective"))?,
            // The report format does not carry convergence state.
            converged: true,
        };
        if let Some(category) = self.category {
            let expected = classify(order).to_string();
            if category != expected {
                return Err(ArimaError::ReportParse {
                    line,
                    message: format!("category `{category}` does not match order {order} ({expected})"),
                });
            }
        }
        Ok(ModelReportEntry {
            country: self.country,
            model,
        })
    }
}

fn parse_coefficients(value: &str, line: usize) -> Result<Vec<f64>, ArimaError> {
    value
        .split_whitespace()
        .map(|token| {
            token.parse::<f64>().map_err(|_| ArimaError::ReportParse {
                line,
                message: format!("bad coefficient `{token}`"),
            })
        })
        .collect()
}

fn parse_number<T: std::str::FromStr>(value: &str, line: usize, field: &str) -> Result<T, ArimaError> {
    value.parse().map_err(|_| ArimaError::ReportParse {
        line,
        message: format!("bad {field} `{value}`"),
    })
}

/// Parses the output of [`write_model_report`] back into entries.
pub fn parse_model_report(text: &str) -> Result<Vec<ModelReportEntry>, ArimaError> {
    let mut entries = Vec::new();
    let mut block = BlockParser::new(1);
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            if !block.is_empty() {
                entries.push(block.finish()?);
            }
            block = BlockParser::new(lineno + 1);
            continue;
        }
        let (key, value) = line.split_once(':').ok_or_else(|| ArimaError::ReportParse {
            line: lineno,
            message: "expected `key: value`".to_owned(),
        })?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "country" => {
                block.country =
                    Some(CountryCode::new(value).map_err(|e| ArimaError::ReportParse {
                        line: lineno,
                        message: e.to_string(),
                    })?)
            }
            "order" => {
                block.order = Some(value.parse().map_err(|_| ArimaError::ReportParse {
                    line: lineno,
                    message: format!("bad order `{value}`"),
                })?)
            }
            "ar" => block.ar = Some(parse_coefficients(value, lineno)?),
            "ma" => block.ma = Some(parse_coefficients(value, lineno)?),
            "constant" => block.constant = Some(parse_number(value, lineno, "constant")?),
            "sigma2" => block.sigma2 = Some(parse_number(value, lineno, "sigma2")?),
            "css" => block.css = Some(parse_number(value, lineno, "css")?),
            "aicc" => block.aicc = Some(parse_number(value, lineno, "aicc")?),
            "n_effective" => block.n_effective = Some(parse_number(value, lineno, "n_effective")?),
            "category" => block.category = Some(value),
            other => {
                return Err(ArimaError::ReportParse {
                    line: lineno,
                    message: format!("unknown field `{other}`"),
                })
            }
        }
    }
    if !block.is_empty() {
        entries.push(block.finish()?);
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arima::fit;

    fn sample_model() -> ArimaModel {
        let series = [0.5, 0.61, 0.58, 0.7, 0.66, 0.75, 0.71, 0.8, 0.78, 0.85];
        fit(&series, ArimaOrder::new(1, 1, 0), true).unwrap()
    }

    #[test]
    fn report_round_trips_exactly() {
        let entries = vec![
            ModelReportEntry {
                country: Some(CountryCode::new("US").unwrap()),
                model: sample_model(),
            },
            ModelReportEntry {
                country: None,
                model: fit(&[0.0, 1.0, 2.0, 3.0, 4.0], ArimaOrder::new(0, 1, 0), true).unwrap(),
            },
        ];
        let mut buf = Vec::new();
        write_model_report(&mut buf, &entries).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let parsed = parse_model_report(&text).unwrap();
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed[0].country, entries[0].country);
        assert_eq!(parsed[0].model, entries[0].model);
        assert_eq!(parsed[1].model, entries[1].model);
    }

    #[test]
    fn report_fields_appear_verbatim() {
        let entry = ModelReportEntry {
            country: Some(CountryCode::new("US").unwrap()),
            model: sample_model(),
        };
        let mut buf = Vec::new();
        write_model_report(&mut buf, &[entry]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        for field in [
            "country:", "order:", "ar:", "ma:", "constant:", "sigma2:", "css:", "aicc:",
            "n_effective:", "category:",
        ] {
            assert!(text.contains(field), "missing {field} in:\n{text}");
        }
        assert!(text.contains("order: (1,1,0)"));
        assert!(text.contains("category: AutoregressiveIntegrated"));
    }

    #[test]
    fn parse_rejects_inconsistent_blocks() {
        let missing = "order: (1,0,0)\nar: 0.5\nma:\nconstant: 0\n";
        assert!(matches!(
            parse_model_report(missing),
            Err(ArimaError::ReportParse { .. })
        ));

        let bad_counts = "order: (2,0,0)\nar: 0.5\nma:\nconstant: 0\nsigma2: 1\ncss: 1\naicc: 0\nn_effective: 10\n";
        assert!(matches!(
            parse_model_report(bad_counts),
            Err(ArimaError::ReportParse { .. })
        ));

        let bad_category = "order: (1,0,0)\nar: 0.5\nma:\nconstant: 0\nsigma2: 1\ncss: 1\naicc: 0\nn_effective: 10\ncategory: WhiteNoise\n";
        assert!(matches!(
            parse_model_report(bad_category),
            Err(ArimaError::ReportParse { .. })
        ));
    }

    #[test]
    fn parse_handles_empty_input() {
        assert!(parse_model_report("").unwrap().is_empty());
        assert!(parse_model_report("\n\n").unwrap().is_empty());
    }
}

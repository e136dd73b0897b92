//! Streaming ingestion of delimiter-separated event rows.
//!
//! Each input line is parsed against an [`EventSchema`]; malformed rows are
//! counted and skipped rather than aborting the run, and only events pairing
//! the target country with a distinct partner are emitted. Memory use is
//! bounded regardless of input size.

use std::fmt;
use std::io::{self, BufRead};
use std::str::FromStr;

use thiserror::Error;

use crate::country::CountryCode;

/// How the year is extracted from the date column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DateFormat {
    /// Eight digits such as `20130115`; the year is the first four.
    #[default]
    Yyyymmdd,
    /// Four digits holding the year itself.
    Yyyy,
}

impl FromStr for DateFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "YYYYMMDD" => Ok(DateFormat::Yyyymmdd),
            "YYYY" => Ok(DateFormat::Yyyy),
            other => Err(format!("unknown date format `{other}` (expected YYYYMMDD or YYYY)")),
        }
    }
}

impl fmt::Display for DateFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DateFormat::Yyyymmdd => f.write_str("YYYYMMDD"),
            DateFormat::Yyyy => f.write_str("YYYY"),
        }
    }
}

/// Error building or parsing an [`EventSchema`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("column indices must be distinct (date={date}, actor1={actor1}, actor2={actor2})")]
    DuplicateColumns {
        date: usize,
        actor1: usize,
        actor2: usize,
    },
    #[error("country_code_length must be positive")]
    ZeroCodeLength,
    #[error("invalid year range {min}..={max}")]
    BadYearRange { min: i32, max: i32 },
    #[error("schema config line {line}: {message}")]
    Config { line: usize, message: String },
}

/// Column layout of one event file.
///
/// Rows may carry any number of extra columns (source, event codes, action
/// locations, ...); only the three indexed here are read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventSchema {
    pub date_column: usize,
    pub date_format: DateFormat,
    pub actor1_country_column: usize,
    pub actor2_country_column: usize,
    pub delimiter: char,
    pub country_code_length: usize,
    /// Inclusive bounds on plausible event years; rows outside are skipped
    /// as bad dates.
    pub min_year: i32,
    pub max_year: i32,
}

impl Default for EventSchema {
    fn default() -> Self {
        Self {
            date_column: 0,
            date_format: DateFormat::Yyyymmdd,
            actor1_country_column: 1,
            actor2_country_column: 2,
            delimiter: '\t',
            country_code_length: 2,
            min_year: 1979,
            max_year: 2100,
        }
    }
}

impl EventSchema {
    pub fn validate(&self) -> Result<(), SchemaError> {
        if self.date_column == self.actor1_country_column
            || self.date_column == self.actor2_country_column
            || self.actor1_country_column == self.actor2_country_column
        {
            return Err(SchemaError::DuplicateColumns {
                date: self.date_column,
                actor1: self.actor1_country_column,
                actor2: self.actor2_country_column,
            });
        }
        if self.country_code_length == 0 {
            return Err(SchemaError::ZeroCodeLength);
        }
        if self.min_year > self.max_year {
            return Err(SchemaError::BadYearRange {
                min: self.min_year,
                max: self.max_year,
            });
        }
        Ok(())
    }

    /// Parses a plain-text `key=value` schema config, one pair per line.
    ///
    /// Recognized keys: `date_column`, `date_format`, `actor1_country_column`,
    /// `actor2_country_column`, `delimiter`, `country_code_length`. Blank
    /// lines and `#` comments are ignored. The delimiter value is a single
    /// literal character, or the two-character escape `\t` for TAB (a literal
    /// tab would be lost to trimming).
    pub fn from_config_str(text: &str) -> Result<Self, SchemaError> {
        let mut schema = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let lineno = idx + 1;
            let (key, value) = line.split_once('=').ok_or_else(|| SchemaError::Config {
                line: lineno,
                message: "expected key=value".to_owned(),
            })?;
            let key = key.trim();
            let value = value.trim();
            match key {
                "date_column" => schema.date_column = parse_config_usize(value, lineno)?,
                "date_format" => {
                    schema.date_format = value.parse().map_err(|message| SchemaError::Config {
                        line: lineno,
                        message,
                    })?
                }
                "actor1_country_column" => {
                    schema.actor1_country_column = parse_config_usize(value, lineno)?
                }
                "actor2_country_column" => {
                    schema.actor2_country_column = parse_config_usize(value, lineno)?
                }
                "delimiter" => schema.delimiter = parse_config_delimiter(value, lineno)?,
                "country_code_length" => {
                    schema.country_code_length = parse_config_usize(value, lineno)?
                }
                other => {
                    return Err(SchemaError::Config {
                        line: lineno,
                        message: format!("unknown key `{other}`"),
                    })
                }
            }
        }
        schema.validate()?;
        Ok(schema)
    }
}

fn parse_config_usize(value: &str, line: usize) -> Result<usize, SchemaError> {
    value.parse().map_err(|_| SchemaError::Config {
        line,
        message: format!("expected a non-negative integer, got `{value}`"),
    })
}

fn parse_config_delimiter(value: &str, line: usize) -> Result<char, SchemaError> {
    if value == "\\t" {
        return Ok('\t');
    }
    let mut chars = value.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(SchemaError::Config {
            line,
            message: format!("delimiter must be one character or `\\t`, got `{value}`"),
        }),
    }
}

/// One parsed news-event row: the year plus both actor country codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventRecord {
    pub year: i32,
    pub actor1: CountryCode,
    pub actor2: CountryCode,
}

impl EventRecord {
    /// The partner country when exactly one actor equals `target`, `None`
    /// when neither or both do.
    pub fn partner_of(&self, target: &CountryCode) -> Option<&CountryCode> {
        match (&self.actor1 == target, &self.actor2 == target) {
            (true, false) => Some(&self.actor2),
            (false, true) => Some(&self.actor1),
            _ => None,
        }
    }
}

/// Why a row was skipped instead of parsed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkipReason {
    /// The row has fewer columns than the schema indexes.
    MissingColumn,
    /// The date field does not parse or falls outside the year range.
    BadDate,
    /// An actor column is present but empty.
    EmptyActor,
    /// An actor code has the wrong length or non-uppercase characters.
    MalformedCode,
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SkipReason::MissingColumn => "missing-column",
            SkipReason::BadDate => "bad-date",
            SkipReason::EmptyActor => "empty-actor",
            SkipReason::MalformedCode => "malformed-code",
        };
        f.write_str(name)
    }
}

/// Counters accumulated by one ingest pass.
///
/// `rows_read = rows_parsed + rows_skipped_malformed` always holds;
/// `rows_filtered_no_target` counts parsed rows dropped because the target
/// was absent or because both actors equal the target.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub rows_read: u64,
    pub rows_parsed: u64,
    pub rows_skipped_malformed: u64,
    pub rows_filtered_no_target: u64,
}

impl IngestStats {
    pub fn rows_emitted(&self) -> u64 {
        self.rows_parsed - self.rows_filtered_no_target
    }
}

impl fmt::Display for IngestStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rows_read={} rows_parsed={} rows_skipped_malformed={} rows_filtered_no_target={}",
            self.rows_read, self.rows_parsed, self.rows_skipped_malformed, self.rows_filtered_no_target
        )
    }
}

/// I/O failure while reading the event source, carrying the counters
/// accumulated up to the failing line.
#[derive(Debug, Error)]
#[error("event source read failed after {} rows: {source}", stats.rows_read)]
pub struct IngestError {
    #[source]
    pub source: io::Error,
    pub stats: IngestStats,
}

/// Parses one delimiter-separated row into an [`EventRecord`].
///
/// Returns a [`SkipReason`] instead of failing hard: bad input is expected
/// in auto-coded event corpora. Actor codes must already be uppercase;
/// lowercase codes are reported as malformed rather than folded.
pub fn parse_record(line: &str, schema: &EventSchema) -> Result<EventRecord, SkipReason> {
    let fields: Vec<&str> = line.split(schema.delimiter).collect();
    let date = *fields
        .get(schema.date_column)
        .ok_or(SkipReason::MissingColumn)?;
    let actor1 = *fields
        .get(schema.actor1_country_column)
        .ok_or(SkipReason::MissingColumn)?;
    let actor2 = *fields
        .get(schema.actor2_country_column)
        .ok_or(SkipReason::MissingColumn)?;

    let year = parse_year(date, schema)?;
    let actor1 = parse_actor(actor1, schema)?;
    let actor2 = parse_actor(actor2, schema)?;
    Ok(EventRecord { year, actor1, actor2 })
}

fn parse_year(field: &str, schema: &EventSchema) -> Result<i32, SkipReason> {
    let expected_len = match schema.date_format {
        DateFormat::Yyyymmdd => 8,
        DateFormat::Yyyy => 4,
    };
    if field.len() != expected_len || !field.bytes().all(|b| b.is_ascii_digit()) {
        return Err(SkipReason::BadDate);
    }
    let year: i32 = field[..4].parse().map_err(|_| SkipReason::BadDate)?;
    if year < schema.min_year || year > schema.max_year {
        return Err(SkipReason::BadDate);
    }
    Ok(year)
}

fn parse_actor(field: &str, schema: &EventSchema) -> Result<CountryCode, SkipReason> {
    if field.is_empty() {
        return Err(SkipReason::EmptyActor);
    }
    if field.len() != schema.country_code_length {
        return Err(SkipReason::MalformedCode);
    }
    CountryCode::new(field).map_err(|_| SkipReason::MalformedCode)
}

/// Streaming iterator over target-involving events.
///
/// Yields records in input order while accumulating [`IngestStats`]. After
/// an I/O failure the stream yields one [`IngestError`] (carrying the stats
/// so far) and then fuses.
#[derive(Debug)]
pub struct IngestStream<R> {
    lines: io::Lines<R>,
    schema: EventSchema,
    target: CountryCode,
    stats: IngestStats,
    skip_remaining: usize,
    fused: bool,
}

impl<R: BufRead> IngestStream<R> {
    /// `skip_header` leading lines are consumed without touching the stats.
    pub fn new(reader: R, schema: EventSchema, target: CountryCode, skip_header: usize) -> Self {
        Self {
            lines: reader.lines(),
            schema,
            target,
            stats: IngestStats::default(),
            skip_remaining: skip_header,
            fused: false,
        }
    }

    /// Counters accumulated so far; final once the stream is exhausted.
    pub fn stats(&self) -> IngestStats {
        self.stats
    }

    pub fn target(&self) -> &CountryCode {
        &self.target
    }

    fn fail(&mut self, source: io::Error) -> Option<Result<EventRecord, IngestError>> {
        self.fused = true;
        Some(Err(IngestError {
            source,
            stats: self.stats,
        }))
    }
}

/// Streams target-involving events from `reader` with no header lines.
pub fn ingest<R: BufRead>(reader: R, schema: EventSchema, target: CountryCode) -> IngestStream<R> {
    IngestStream::new(reader, schema, target, 0)
}

impl<R: BufRead> Iterator for IngestStream<R> {
    type Item = Result<EventRecord, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.fused {
            return None;
        }
        while self.skip_remaining > 0 {
            match self.lines.next() {
                None => return None,
                Some(Err(e)) => return self.fail(e),
                Some(Ok(_)) => self.skip_remaining -= 1,
            }
        }
        loop {
            let line = match self.lines.next() {
                None => return None,
                Some(Err(e)) => return self.fail(e),
                Some(Ok(line)) => line,
            };
            self.stats.rows_read += 1;
            let record = match parse_record(&line, &self.schema) {
                Err(_) => {
                    self.stats.rows_skipped_malformed += 1;
                    continue;
                }
                Ok(record) => record,
            };
            self.stats.rows_parsed += 1;
            if record.partner_of(&self.target).is_none() {
                self.stats.rows_filtered_no_target += 1;
                continue;
            }
            return Some(Ok(record));
        }
    }
}

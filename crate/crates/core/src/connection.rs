//! Yearly dyad aggregation and connection strengths.
//!
//! Records are tallied into per-year partner frequencies; a partner's
//! connection strength in a year is its share of all dyadic records the
//! target was involved in that year. Only records involving the target
//! count, so events between two other countries never move any strength.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::country::CountryCode;
use crate::event_ingest::EventRecord;

#[derive(Debug, Error)]
pub enum ConnectionError {
    #[error("year {0} has no dyad records; connection strength is undefined")]
    UndefinedYear(i32),
    #[error("record in year {year} does not pair target {target} with a distinct partner")]
    NotADyad { year: i32, target: CountryCode },
    #[error("invalid year span {first}..={last}")]
    InvalidSpan { first: i32, last: i32 },
    #[error("csv line {line}: {message}")]
    CsvParse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// What to do for a year whose dyad total is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GapPolicy {
    /// Refuse to build a series across the gap.
    #[default]
    Strict,
    /// Emit 0 for the gap year.
    FillZero,
}

/// Per-year co-occurrence counts between the target country and each
/// partner, plus the per-year totals used as normalization denominators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadFrequencyTable {
    target: CountryCode,
    counts: BTreeMap<i32, BTreeMap<CountryCode, u64>>,
    year_totals: BTreeMap<i32, u64>,
}

impl DyadFrequencyTable {
    pub fn new(target: CountryCode) -> Self {
        Self {
            target,
            counts: BTreeMap::new(),
            year_totals: BTreeMap::new(),
        }
    }

    pub fn target(&self) -> &CountryCode {
        &self.target
    }

    /// Tallies one record, regardless of which actor slot holds the target.
    ///
    /// Records that do not pair the target with a distinct partner are a
    /// pipeline bug by the time they reach the table, hence a hard error.
    pub fn add(&mut self, record: &EventRecord) -> Result<(), ConnectionError> {
        let partner = record
            .partner_of(&self.target)
            .ok_or_else(|| ConnectionError::NotADyad {
                year: record.year,
                target: self.target.clone(),
            })?;
        self.add_count(record.year, partner.clone(), 1);
        Ok(())
    }

    fn add_count(&mut self, year: i32, partner: CountryCode, count: u64) {
        *self
            .counts
            .entry(year)
            .or_default()
            .entry(partner)
            .or_insert(0) += count;
        *self.year_totals.entry(year).or_insert(0) += count;
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn first_year(&self) -> Option<i32> {
        self.counts.keys().next().copied()
    }

    pub fn last_year(&self) -> Option<i32> {
        self.counts.keys().next_back().copied()
    }

    pub fn count(&self, year: i32, partner: &CountryCode) -> u64 {
        self.counts
            .get(&year)
            .and_then(|m| m.get(partner))
            .copied()
            .unwrap_or(0)
    }

    pub fn year_total(&self, year: i32) -> u64 {
        self.year_totals.get(&year).copied().unwrap_or(0)
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        self.counts.keys().copied()
    }

    pub fn partners_in_year(&self, year: i32) -> impl Iterator<Item = &CountryCode> {
        self.counts.get(&year).into_iter().flat_map(|m| m.keys())
    }

    /// Total co-occurrence per partner summed over all years.
    pub fn partner_totals(&self) -> BTreeMap<CountryCode, u64> {
        let mut totals: BTreeMap<CountryCode, u64> = BTreeMap::new();
        for year_counts in self.counts.values() {
            for (partner, count) in year_counts {
                *totals.entry(partner.clone()).or_insert(0) += count;
            }
        }
        totals
    }
}

/// Tallies pre-filtered records into a frequency table.
pub fn accumulate<I>(records: I, target: &CountryCode) -> Result<DyadFrequencyTable, ConnectionError>
where
    I: IntoIterator<Item = EventRecord>,
{
    let mut table = DyadFrequencyTable::new(target.clone());
    for record in records {
        table.add(&record)?;
    }
    Ok(table)
}

/// The partner's share of the target's dyadic records in `year`.
///
/// A partner absent from a present year scores 0; a year with no dyad
/// records at all has no defined strength and is an error rather than 0.
pub fn connection_strength(
    table: &DyadFrequencyTable,
    year: i32,
    partner: &CountryCode,
) -> Result<f64, ConnectionError> {
    let total = table.year_total(year);
    if total == 0 {
        return Err(ConnectionError::UndefinedYear(year));
    }
    Ok(table.count(year, partner) as f64 / total as f64)
}

/// Partners ranked by total co-occurrence over all years, descending, ties
/// broken by ascending country code. Returns at most `k` entries.
pub fn top_k(table: &DyadFrequencyTable, k: usize) -> Vec<CountryCode> {
    let mut ranked: Vec<(CountryCode, u64)> = table.partner_totals().into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(k);
    ranked.into_iter().map(|(country, _)| country).collect()
}

/// One partner's yearly connection strengths over a contiguous span.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionSeries {
    country: CountryCode,
    start_year: i32,
    values: Vec<f64>,
}

impl ConnectionSeries {
    /// Builds a series, checking every value lies in `[0, 1]`.
    pub fn new(
        country: CountryCode,
        start_year: i32,
        values: Vec<f64>,
    ) -> Result<Self, ConnectionError> {
        if let Some(bad) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(ConnectionError::CsvParse {
                line: 0,
                message: format!("strength {bad} for {country} outside [0,1]"),
            });
        }
        Ok(Self {
            country,
            start_year,
            values,
        })
    }

    pub fn country(&self) -> &CountryCode {
        &self.country
    }

    pub fn start_year(&self) -> i32 {
        self.start_year
    }

    pub fn last_year(&self) -> i32 {
        self.start_year + self.values.len() as i32 - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn year_values(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| (self.start_year + i as i32, v))
    }
}

/// One strength per year from `first_year` through `last_year`.
///
/// Years where the partner is absent but the target has records contribute
/// 0; years with no target records at all follow `policy`.
pub fn build_series(
    table: &DyadFrequencyTable,
    partner: &CountryCode,
    first_year: i32,
    last_year: i32,
    policy: GapPolicy,
) -> Result<ConnectionSeries, ConnectionError> {
    if first_year > last_year {
        return Err(ConnectionError::InvalidSpan {
            first: first_year,
            last: last_year,
        });
    }
    let mut values = Vec::with_capacity((last_year - first_year + 1) as usize);
    for year in first_year..=last_year {
        match connection_strength(table, year, partner) {
            Ok(v) => values.push(v),
            Err(ConnectionError::UndefinedYear(_)) if policy == GapPolicy::FillZero => {
                values.push(0.0)
            }
            Err(e) => return Err(e),
        }
    }
    ConnectionSeries::new(partner.clone(), first_year, values)
}

/// Formats with up to `sig` significant digits, trailing zeros trimmed.
fn format_sig(value: f64, sig: i32) -> String {
    if value == 0.0 {
        return "0".to_owned();
    }
    let magnitude = value.abs().log10().floor() as i32;
    let decimals = (sig - 1 - magnitude).max(0) as usize;
    let mut s = format!("{value:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

pub const SERIES_CSV_HEADER: &str = "country,year,strength";
pub const FREQUENCY_CSV_HEADER: &str = "year,partner,count";

/// Writes `country,year,strength` rows, strengths at up to 6 significant
/// digits, series in the given (rank) order.
pub fn write_series_csv<W: Write>(mut w: W, series: &[ConnectionSeries]) -> io::Result<()> {
    writeln!(w, "{SERIES_CSV_HEADER}")?;
    for s in series {
        for (year, value) in s.year_values() {
            writeln!(w, "{},{},{}", s.country(), year, format_sig(value, 6))?;
        }
    }
    Ok(())
}

/// Reads a series CSV back, preserving first-seen country order and
/// requiring contiguous ascending years per country.
pub fn read_series_csv<R: BufRead>(reader: R) -> Result<Vec<ConnectionSeries>, ConnectionError> {
    let mut lines = reader.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line?,
        None => {
            return Err(ConnectionError::CsvParse {
                line: 1,
                message: "empty file".to_owned(),
            })
        }
    };
    if header.trim_end() != SERIES_CSV_HEADER {
        return Err(ConnectionError::CsvParse {
            line: 1,
            message: format!("expected header `{SERIES_CSV_HEADER}`"),
        });
    }

    struct Partial {
        country: CountryCode,
        start_year: i32,
        values: Vec<f64>,
    }
    let mut order: Vec<Partial> = Vec::new();

    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parse = |message: String| ConnectionError::CsvParse {
            line: lineno,
            message,
        };
        let mut fields = line.split(',');
        let (country, year, value) = match (fields.next(), fields.next(), fields.next(), fields.next()) {
            (Some(c), Some(y), Some(v), None) => (c, y, v),
            _ => return Err(parse("expected `country,year,strength`".to_owned())),
        };
        let country =
            CountryCode::new(country.trim()).map_err(|e| parse(e.to_string()))?;
        let year: i32 = year
            .trim()
            .parse()
            .map_err(|_| parse(format!("bad year `{year}`")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| parse(format!("bad strength `{value}`")))?;
        if !(0.0..=1.0).contains(&value) {
            return Err(parse(format!("strength {value} outside [0,1]")));
        }
        match order.iter_mut().find(|p| p.country == country) {
            Some(partial) => {
                let expected = partial.start_year + partial.values.len() as i32;
                if year != expected {
                    return Err(parse(format!(
                        "non-contiguous year {year} for {country}, expected {expected}"
                    )));
                }
                partial.values.push(value);
            }
            None => order.push(Partial {
                country,
                start_year: year,
                values: vec![value],
            }),
        }
    }

    order
        .into_iter()
        .map(|p| ConnectionSeries::new(p.country, p.start_year, p.values))
        .collect()
}

/// Writes `year,partner,count` rows, sorted by year then partner.
pub fn write_frequency_csv<W: Write>(mut w: W, table: &DyadFrequencyTable) -> io::Result<()> {
    writeln!(w, "{FREQUENCY_CSV_HEADER}")?;
    for year in table.years() {
        for partner in table.partners_in_year(year) {
            writeln!(w, "{},{},{}", year, partner, table.count(year, partner))?;
        }
    }
    Ok(())
}

/// Reads a frequency CSV into a table for `target`. A partner equal to the
/// target or a duplicate `(year, partner)` entry is a parse error.
pub fn read_frequency_csv<R: BufRead>(
    reader: R,
    target: &CountryCode,
) -> Result<DyadFrequencyTable, ConnectionError> {
    let mut lines = reader.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line?,
        None => {
            return Err(ConnectionError::CsvParse {
                line: 1,
                message: "empty file".to_owned(),
            })
        }
    };
    if header.trim_end() != FREQUENCY_CSV_HEADER {
        return Err(ConnectionError::CsvParse {
            line: 1,
            message: format!("expected header `{FREQUENCY_CSV_HEADER}`"),
        });
    }

    let mut table = DyadFrequencyTable::new(target.clone());
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parse = |message: String| ConnectionError::CsvParse {
            line: lineno,
            message,
        };
        let mut fields = line.split(',');
        let (year, partner, count) = match (fields.next(), fields.next(), fields.next(), fields.next()) {
            (Some(y), Some(p), Some(c), None) => (y, p, c),
            _ => return Err(parse("expected `year,partner,count`".to_owned())),
        };
        let year: i32 = year
            .trim()
            .parse()
            .map_err(|_| parse(format!("bad year `{year}`")))?;
        let partner =
            CountryCode::new(partner.trim()).map_err(|e| parse(e.to_string()))?;
        if &partner == target {
            return Err(parse(format!("partner equals target {target}")));
        }
        let count: u64 = count
            .trim()
            .parse()
            .map_err(|_| parse(format!("bad count `{count}`")))?;
        if table.count(year, &partner) > 0 {
            return Err(parse(format!("duplicate entry for {year},{partner}")));
        }
        table.add_count(year, partner, count);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;
    use std::io::Cursor;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use crate::event_ingest::{ingest, EventSchema};

    fn code(s: &str) -> CountryCode {
        CountryCode::new(s).unwrap()
    }

    fn record(year: i32, a1: &str, a2: &str) -> EventRecord {
        EventRecord {
            year,
            actor1: code(a1),
            actor2: code(a2),
        }
    }

    #[test]
    fn accumulate_is_order_insensitive() {
        let records = vec![
            record(1979, "US", "CH"),
            record(1979, "CH", "US"),
            record(1979, "CH", "JA"),
        ];
        let table = accumulate(records, &code("CH")).unwrap();
        assert_eq!(table.count(1979, &code("US")), 2);
        assert_eq!(table.count(1979, &code("JA")), 1);
        assert_eq!(table.year_total(1979), 3);
    }

    #[test]
    fn accumulate_empty_is_empty() {
        let table = accumulate(Vec::new(), &code("CH")).unwrap();
        assert!(table.is_empty());
        assert_eq!(table.first_year(), None);
    }

    #[test]
    fn accumulate_rejects_non_dyads() {
        let err = accumulate(vec![record(1980, "US", "JA")], &code("CH")).unwrap_err();
        assert!(matches!(err, ConnectionError::NotADyad { year: 1980, .. }));
        let err = accumulate(vec![record(1980, "CH", "CH")], &code("CH")).unwrap_err();
        assert!(matches!(err, ConnectionError::NotADyad { .. }));
    }

    // 500-row fixture checked against an independent tally.
    #[test]
    fn accumulate_matches_brute_force_tally() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let partners = ["US", "JA", "RS", "KS", "UK", "FR"];
        let mut tuples: Vec<(i32, &str)> = Vec::new();
        for _ in 0..500 {
            let year = rng.gen_range(1979..=1990);
            let partner = partners[rng.gen_range(0..partners.len())];
            tuples.push((year, partner));
        }

        // Oracle: plain hash-map tally over the generating tuples.
        let mut oracle: HashMap<(i32, &str), u64> = HashMap::new();
        let mut oracle_totals: HashMap<i32, u64> = HashMap::new();
        for &(year, partner) in &tuples {
            *oracle.entry((year, partner)).or_insert(0) += 1;
            *oracle_totals.entry(year).or_insert(0) += 1;
        }

        let records: Vec<EventRecord> = tuples
            .iter()
            .enumerate()
            .map(|(i, &(year, partner))| {
                if i % 2 == 0 {
                    record(year, "CH", partner)
                } else {
                    record(year, partner, "CH")
                }
            })
            .collect();
        let table = accumulate(records, &code("CH")).unwrap();

        for (&(year, partner), &count) in &oracle {
            assert_eq!(table.count(year, &code(partner)), count);
        }
        for (&year, &total) in &oracle_totals {
            assert_eq!(table.year_total(year), total);
        }
    }

    #[test]
    fn strength_is_the_yearly_share() {
        let records = vec![
            record(1979, "US", "CH"),
            record(1979, "CH", "US"),
            record(1979, "US", "CH"),
            record(1979, "CH", "JA"),
        ];
        let table = accumulate(records, &code("CH")).unwrap();
        assert_eq!(connection_strength(&table, 1979, &code("US")).unwrap(), 0.75);
        // Absent partner in a present year scores zero.
        assert_eq!(connection_strength(&table, 1979, &code("FR")).unwrap(), 0.0);
    }

    #[test]
    fn single_partner_normalizes_to_one() {
        let table = accumulate(vec![record(1980, "CH", "JA")], &code("CH")).unwrap();
        assert_eq!(connection_strength(&table, 1980, &code("JA")).unwrap(), 1.0);
    }

    #[test]
    fn absent_year_is_an_error_not_zero() {
        let table = accumulate(vec![record(1980, "CH", "JA")], &code("CH")).unwrap();
        assert!(matches!(
            connection_strength(&table, 1985, &code("JA")),
            Err(ConnectionError::UndefinedYear(1985))
        ));
    }

    // Five-country fixture with hand-tallied shares.
    #[test]
    fn strengths_match_hand_tally() {
        let mut records = Vec::new();
        let spec = [("US", 6), ("JA", 3), ("RS", 3), ("KS", 2), ("UK", 1)];
        for (partner, n) in spec {
            for _ in 0..n {
                records.push(record(1990, "CH", partner));
            }
        }
        let table = accumulate(records, &code("CH")).unwrap();
        let total = 15.0;
        for (partner, n) in spec {
            let expected = n as f64 / total;
            let got = connection_strength(&table, 1990, &code(partner)).unwrap();
            assert!((got - expected).abs() < 1e-15, "{partner}: {got} vs {expected}");
        }
    }

    #[test]
    fn top_k_breaks_ties_lexicographically() {
        let mut records = Vec::new();
        for _ in 0..10 {
            records.push(record(1990, "CH", "US"));
        }
        for _ in 0..5 {
            records.push(record(1990, "CH", "RS"));
            records.push(record(1990, "CH", "JA"));
        }
        let table = accumulate(records, &code("CH")).unwrap();
        assert_eq!(top_k(&table, 2), vec![code("US"), code("JA")]);
        // k beyond the partner count returns everyone.
        assert_eq!(top_k(&table, 10), vec![code("US"), code("JA"), code("RS")]);
    }

    #[test]
    fn top_k_ranks_by_total_over_all_years() {
        let records = vec![
            record(1990, "CH", "US"),
            record(1990, "CH", "US"),
            record(1990, "CH", "JA"),
            record(1991, "CH", "JA"),
            record(1991, "CH", "JA"),
            record(1991, "CH", "RS"),
        ];
        let table = accumulate(records, &code("CH")).unwrap();
        // US 2, JA 3, RS 1 overall.
        assert_eq!(top_k(&table, 3), vec![code("JA"), code("US"), code("RS")]);
    }

    #[test]
    fn build_series_covers_the_span() {
        let records = vec![
            record(1979, "CH", "US"),
            record(1980, "CH", "US"),
            record(1980, "CH", "JA"),
            record(1981, "CH", "JA"),
        ];
        let table = accumulate(records, &code("CH")).unwrap();
        let series = build_series(&table, &code("US"), 1979, 1981, GapPolicy::Strict).unwrap();
        assert_eq!(series.len(), 3);
        assert_eq!(series.values(), &[1.0, 0.5, 0.0]);
        assert_eq!(series.start_year(), 1979);
        assert_eq!(series.last_year(), 1981);
    }

    #[test]
    fn gap_year_respects_policy() {
        let records = vec![record(1979, "CH", "US"), record(1981, "CH", "US")];
        let table = accumulate(records, &code("CH")).unwrap();
        assert!(matches!(
            build_series(&table, &code("US"), 1979, 1981, GapPolicy::Strict),
            Err(ConnectionError::UndefinedYear(1980))
        ));
        let filled = build_series(&table, &code("US"), 1979, 1981, GapPolicy::FillZero).unwrap();
        assert_eq!(filled.values(), &[1.0, 0.0, 1.0]);
    }

    #[test]
    fn build_series_rejects_reversed_span() {
        let table = accumulate(vec![record(1980, "CH", "US")], &code("CH")).unwrap();
        assert!(matches!(
            build_series(&table, &code("US"), 1981, 1980, GapPolicy::Strict),
            Err(ConnectionError::InvalidSpan { .. })
        ));
    }

    fn random_table(rng: &mut ChaCha8Rng) -> DyadFrequencyTable {
        let partners = ["US", "JA", "RS", "KS", "UK", "FR", "IR"];
        let mut records = Vec::new();
        for year in 1979..=1989 {
            let rows = rng.gen_range(1..=40);
            for _ in 0..rows {
                let partner = partners[rng.gen_range(0..partners.len())];
                if rng.gen_bool(0.5) {
                    records.push(record(year, "CH", partner));
                } else {
                    records.push(record(year, partner, "CH"));
                }
            }
        }
        accumulate(records, &code("CH")).unwrap()
    }

    #[test]
    fn strengths_sum_to_one_per_year() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..20 {
            let table = random_table(&mut rng);
            for year in table.years() {
                let sum: f64 = table
                    .partners_in_year(year)
                    .map(|p| connection_strength(&table, year, p).unwrap())
                    .sum();
                assert!((sum - 1.0).abs() < 1e-12, "year {year} sums to {sum}");
            }
        }
    }

    #[test]
    fn duplicating_records_changes_nothing() {
        let base = vec![
            record(1979, "CH", "US"),
            record(1979, "CH", "US"),
            record(1979, "CH", "JA"),
            record(1980, "JA", "CH"),
            record(1980, "CH", "US"),
        ];
        let mut doubled = base.clone();
        doubled.extend(base.clone());

        let t1 = accumulate(base, &code("CH")).unwrap();
        let t2 = accumulate(doubled, &code("CH")).unwrap();
        for year in t1.years() {
            for partner in t1.partners_in_year(year) {
                let a = connection_strength(&t1, year, partner).unwrap();
                let b = connection_strength(&t2, year, partner).unwrap();
                assert_eq!(a, b);
            }
        }
        assert_eq!(top_k(&t1, 5), top_k(&t2, 5));
    }

    // Events between two non-target countries never move any strength.
    #[test]
    fn one_way_semantics_ignore_other_dyads() {
        let base = "19800101\tCH\tUS\n19800102\tJA\tCH\n19800103\tCH\tUS\n";
        let noise = "19800104\tUS\tJA\n19800105\tRS\tUK\n19800106\tJA\tUS\n";
        let with_noise = format!("{base}{noise}");

        let run = |input: &str| {
            let stream = ingest(
                Cursor::new(input.to_owned()),
                EventSchema::default(),
                code("CH"),
            );
            accumulate(stream.map(|r| r.unwrap()), &code("CH")).unwrap()
        };
        assert_eq!(run(base), run(&with_noise));
    }

    #[test]
    fn series_csv_round_trip() {
        let series = vec![
            ConnectionSeries::new(code("US"), 1979, vec![0.162, 0.174, 0.191]).unwrap(),
            ConnectionSeries::new(code("JA"), 1979, vec![0.1, 0.0466667, 1.0]).unwrap(),
        ];
        let mut buf = Vec::new();
        write_series_csv(&mut buf, &series).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("country,year,strength\nUS,1979,0.162\n"));
        assert!(text.contains("JA,1980,0.0466667\n"));
        assert!(text.contains("JA,1981,1\n"));

        let parsed = read_series_csv(Cursor::new(buf)).unwrap();
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed[0].country(), &code("US"));
        assert_eq!(parsed[0].values(), series[0].values());
        assert_eq!(parsed[1].start_year(), 1979);
    }

    #[test]
    fn series_csv_rejects_gaps_and_bad_values() {
        let gappy = "country,year,strength\nUS,1979,0.5\nUS,1981,0.5\n";
        assert!(matches!(
            read_series_csv(Cursor::new(gappy.as_bytes().to_vec())),
            Err(ConnectionError::CsvParse { line: 3, .. })
        ));
        let out_of_range = "country,year,strength\nUS,1979,1.5\n";
        assert!(read_series_csv(Cursor::new(out_of_range.as_bytes().to_vec())).is_err());
        let bad_header = "partner,year,value\n";
        assert!(read_series_csv(Cursor::new(bad_header.as_bytes().to_vec())).is_err());
    }

    #[test]
    fn frequency_csv_round_trip() {
        let records = vec![
            record(1979, "CH", "US"),
            record(1979, "CH", "US"),
            record(1980, "JA", "CH"),
        ];
        let table = accumulate(records, &code("CH")).unwrap();
        let mut buf = Vec::new();
        write_frequency_csv(&mut buf, &table).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "year,partner,count\n1979,US,2\n1980,JA,1\n"
        );
        let parsed = read_frequency_csv(Cursor::new(buf), &code("CH")).unwrap();
        assert_eq!(parsed, table);
    }

    #[test]
    fn frequency_csv_rejects_target_partner() {
        let text = "year,partner,count\n1979,CH,2\n";
        assert!(matches!(
            read_frequency_csv(Cursor::new(text.as_bytes().to_vec()), &code("CH")),
            Err(ConnectionError::CsvParse { line: 2, .. })
        ));
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(0.162, 6), "0.162");
        assert_eq!(format_sig(1.0, 6), "1");
        assert_eq!(format_sig(0.0, 6), "0");
        assert_eq!(format_sig(1.0 / 3.0, 6), "0.333333");
        assert_eq!(format_sig(0.0466666666, 6), "0.0466667");
    }
}

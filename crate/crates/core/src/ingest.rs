//! Input handling: evaluation logs in two formats, timestamp parsing, and
//! the mapping from timestamps to discrete interval labels.
//!
//! Ingestion never silently drops data. A malformed record becomes a
//! `RejectedRow` carrying its line number and a reason; the caller decides
//! whether rejects are tolerable. Only the absence of any usable record is a
//! hard error.

use std::io::{Read, Write};

use chrono::{DateTime, NaiveDateTime};

use crate::config::IntervalWidth;
use crate::error::{Error, Result};
use crate::ActorId;

// ---------------- timestamps and interval labels ----------------

/// Parses `YYYY-MM-DD HH:MM:SS`, the same with a `T` separator, optional
/// fractional seconds, or a full RFC 3339 stamp (normalized to UTC).
pub fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    const FORMATS: [&str; 4] = [
        "%Y-%m-%d %H:%M:%S",
        "%Y-%m-%dT%H:%M:%S",
        "%Y-%m-%d %H:%M:%S%.f",
        "%Y-%m-%dT%H:%M:%S%.f",
    ];
    for fmt in FORMATS {
        if let Ok(ts) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(ts);
        }
    }
    DateTime::parse_from_rfc3339(s).ok().map(|dt| dt.naive_utc())
}

/// Truncates a timestamp to the start of its calendar day.
pub fn day_start(ts: NaiveDateTime) -> NaiveDateTime {
    ts.date().and_hms_opt(0, 0, 0).expect("midnight exists")
}

/// Fixed-width partition of the time axis. Interval labels start at 1 for
/// the interval beginning at the epoch and grow toward the present.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntervalScheme {
    epoch: NaiveDateTime,
    width: IntervalWidth,
}

impl IntervalScheme {
    pub fn new(epoch: NaiveDateTime, width: IntervalWidth) -> Self {
        IntervalScheme { epoch, width }
    }

    /// Scheme whose epoch is the start of the day containing `earliest`, so
    /// every record at or after `earliest` gets a valid label.
    pub fn starting_at_day(earliest: NaiveDateTime, width: IntervalWidth) -> Self {
        IntervalScheme::new(day_start(earliest), width)
    }

    pub fn epoch(&self) -> NaiveDateTime {
        self.epoch
    }

    pub fn width(&self) -> IntervalWidth {
        self.width
    }

    /// Label of the interval containing `ts`: `1 + floor((ts - epoch) / width)`.
    pub fn label_of(&self, ts: NaiveDateTime) -> Result<u32> {
        let delta = (ts - self.epoch).num_seconds();
        if delta < 0 {
            return Err(Error::BeforeEpoch(ts.to_string()));
        }
        let index = delta / self.width.seconds();
        u32::try_from(index + 1).map_err(|_| {
            Error::InvalidConfig(format!(
                "timestamp {ts} is too far after the epoch for {} intervals",
                self.width
            ))
        })
    }
}

// ---------------- record types ----------------

/// One accepted evaluation, ready for graph construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub evaluator: ActorId,
    pub worker: ActorId,
    /// Value on the `[0, M]` scale.
    pub value: f64,
    pub timestamp: NaiveDateTime,
    /// Interval label derived from `timestamp`.
    pub time_label: u32,
    /// Positive effort credit; 1 when the source carries none.
    pub credit: f64,
    /// Line number in the source file. Used for diagnostics and as the
    /// stable tie-break when ordering simultaneous evaluations.
    pub source_row: u64,
}

/// A record that failed validation, with the reason it was refused.
#[derive(Debug, Clone, PartialEq)]
pub struct RejectedRow {
    pub line: u64,
    pub reason: String,
}

/// Result of an ingestion pass.
#[derive(Debug, Default)]
pub struct IngestOutcome {
    pub evaluations: Vec<Evaluation>,
    pub rejected: Vec<RejectedRow>,
    pub warnings: Vec<String>,
}

/// Raw rows of some source format plus per-row rejects.
#[derive(Debug)]
pub struct RawParse<T> {
    pub rows: Vec<T>,
    pub rejected: Vec<RejectedRow>,
    pub warnings: Vec<String>,
}

/// One vote from an adminship election log: the voter evaluates the nominee.
#[derive(Debug, Clone, PartialEq)]
pub struct RawWikiVote {
    pub election_close: NaiveDateTime,
    pub nominator: String,
    pub nominee: String,
    /// 1 if the election succeeded, 0 otherwise. Not used by the model;
    /// kept so the record survives a round trip.
    pub outcome: u8,
    pub voter_id: i64,
    pub voter: String,
    /// -1 oppose, 0 neutral, 1 support.
    pub vote: i8,
    pub vote_time: NaiveDateTime,
    pub line: u64,
}

impl RawWikiVote {
    /// Vote on the three-point scale: oppose 1, neutral 2, support 3.
    pub fn value(&self) -> f64 {
        (self.vote + 2) as f64
    }
}

/// One row of the generic evaluation format.
#[derive(Debug, Clone, PartialEq)]
pub struct GenericRow {
    pub evaluator: String,
    pub worker: String,
    pub value: f64,
    pub timestamp: NaiveDateTime,
    pub credit: f64,
    pub line: u64,
}

/// Field separator of an election log file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dialect {
    Tab,
    Comma,
}

impl Dialect {
    fn delimiter(self) -> u8 {
        match self {
            Dialect::Tab => b'\t',
            Dialect::Comma => b',',
        }
    }
}

// ---------------- election log reader ----------------

const WIKI_FIELDS: usize = 8;

/// Reads an election log with one vote per row and eight fields:
/// close time, nominator, nominee, outcome, voter id, voter name, vote,
/// vote time. No header. Malformed rows are rejected, not fatal.
pub fn read_wiki_rows(reader: impl Read, dialect: Dialect) -> Result<RawParse<RawWikiVote>> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .delimiter(dialect.delimiter())
        .has_headers(false)
        .flexible(true)
        .quoting(false)
        .from_reader(reader);

    let mut rows = Vec::new();
    let mut rejected = Vec::new();
    for record in csv_reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        match wiki_row_from_record(&record, line) {
            Ok(row) => rows.push(row),
            Err(reason) => rejected.push(RejectedRow { line, reason }),
        }
    }

    let mut warnings = Vec::new();
    if rows.is_empty() && rejected.is_empty() {
        warnings.push("input contained no data rows".to_string());
    }
    Ok(RawParse { rows, rejected, warnings })
}

fn wiki_row_from_record(
    record: &csv::StringRecord,
    line: u64,
) -> std::result::Result<RawWikiVote, String> {
    if record.len() != WIKI_FIELDS {
        return Err(format!("expected {WIKI_FIELDS} fields, got {}", record.len()));
    }
    let field = |i: usize| record.get(i).unwrap_or("").trim();

    let election_close = parse_timestamp(field(0))
        .ok_or_else(|| format!("bad election close time `{}`", field(0)))?;
    let nominator = field(1).to_string();
    let nominee = field(2).to_string();
    if nominee.is_empty() {
        return Err("empty nominee name".to_string());
    }
    let outcome: u8 = match field(3) {
        "0" => 0,
        "1" => 1,
        other => return Err(format!("bad election outcome `{other}` (expected 0 or 1)")),
    };
    let voter_id: i64 = field(4)
        .parse()
        .map_err(|_| format!("bad voter id `{}`", field(4)))?;
    let voter = field(5).to_string();
    if voter.is_empty() {
        return Err("empty voter name".to_string());
    }
    let vote: i8 = match field(6) {
        "-1" => -1,
        "0" => 0,
        "1" => 1,
        other => return Err(format!("bad vote `{other}` (expected -1, 0, or 1)")),
    };
    let vote_time = parse_timestamp(field(7))
        .ok_or_else(|| format!("bad vote time `{}`", field(7)))?;

    Ok(RawWikiVote {
        election_close,
        nominator,
        nominee,
        outcome,
        voter_id,
        voter,
        vote,
        vote_time,
        line,
    })
}

// ---------------- generic format reader ----------------

const GENERIC_HEADER: [&str; 5] = ["evaluator", "worker", "value", "timestamp", "credit"];

/// Reads the generic format: a header of `evaluator,worker,value,timestamp`
/// with an optional trailing `credit` column. Missing credit defaults to 1.
/// Values must lie in `[0, scale_max]` and credits must be positive.
pub fn read_generic_rows(reader: impl Read, scale_max: f64) -> Result<RawParse<GenericRow>> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);

    let headers = csv_reader.headers()?.clone();
    let header_len = check_generic_header(&headers)?;

    let mut rows = Vec::new();
    let mut rejected = Vec::new();
    for record in csv_reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        match generic_row_from_record(&record, header_len, scale_max, line) {
            Ok(row) => rows.push(row),
            Err(reason) => rejected.push(RejectedRow { line, reason }),
        }
    }

    let mut warnings = Vec::new();
    if rows.is_empty() && rejected.is_empty() {
        warnings.push("input contained no data rows".to_string());
    }
    Ok(RawParse { rows, rejected, warnings })
}

fn check_generic_header(headers: &csv::StringRecord) -> Result<usize> {
    let got: Vec<String> = headers
        .iter()
        .map(|h| h.trim_start_matches('\u{feff}').trim().to_ascii_lowercase())
        .collect();
    let want_full = &GENERIC_HEADER[..];
    let want_short = &GENERIC_HEADER[..4];
    if got == want_full {
        Ok(5)
    } else if got == want_short {
        Ok(4)
    } else {
        Err(Error::Malformed {
            line: 1,
            msg: format!(
                "unexpected header `{}` (expected `{}` with credit optional)",
                got.join(","),
                GENERIC_HEADER.join(",")
            ),
        })
    }
}

fn generic_row_from_record(
    record: &csv::StringRecord,
    header_len: usize,
    scale_max: f64,
    line: u64,
) -> std::result::Result<GenericRow, String> {
    if record.len() != header_len {
        return Err(format!("expected {header_len} fields, got {}", record.len()));
    }
    let field = |i: usize| record.get(i).unwrap_or("").trim();

    let evaluator = field(0).to_string();
    if evaluator.is_empty() {
        return Err("empty evaluator".to_string());
    }
    let worker = field(1).to_string();
    if worker.is_empty() {
        return Err("empty worker".to_string());
    }
    let value: f64 = field(2)
        .parse()
        .map_err(|_| format!("bad value `{}`", field(2)))?;
    if !value.is_finite() || value < 0.0 || value > scale_max {
        return Err(format!("value {value} outside the scale [0, {scale_max}]"));
    }
    let timestamp = parse_timestamp(field(3))
        .ok_or_else(|| format!("bad timestamp `{}`", field(3)))?;
    let credit: f64 = if header_len == 5 {
        let raw = field(4);
        if raw.is_empty() {
            1.0
        } else {
            raw.parse()
                .map_err(|_| format!("bad credit `{raw}`"))?
        }
    } else {
        1.0
    };
    if !credit.is_finite() || credit <= 0.0 {
        return Err(format!("credit must be positive, got {credit}"));
    }

    Ok(GenericRow { evaluator, worker, value, timestamp, credit, line })
}

// ---------------- labeling and assembly ----------------

/// Attaches interval labels to accepted election votes. Rows whose vote
/// time cannot be labeled under `scheme` are rejected.
pub fn wiki_to_evaluations(
    rows: &[RawWikiVote],
    scheme: &IntervalScheme,
) -> (Vec<Evaluation>, Vec<RejectedRow>) {
    let mut evaluations = Vec::with_capacity(rows.len());
    let mut rejected = Vec::new();
    for row in rows {
        match scheme.label_of(row.vote_time) {
            Ok(time_label) => evaluations.push(Evaluation {
                evaluator: row.voter.clone(),
                worker: row.nominee.clone(),
                value: row.value(),
                timestamp: row.vote_time,
                time_label,
                credit: 1.0,
                source_row: row.line,
            }),
            Err(err) => rejected.push(RejectedRow { line: row.line, reason: err.to_string() }),
        }
    }
    (evaluations, rejected)
}

/// Attaches interval labels to accepted generic rows.
pub fn generic_to_evaluations(
    rows: &[GenericRow],
    scheme: &IntervalScheme,
) -> (Vec<Evaluation>, Vec<RejectedRow>) {
    let mut evaluations = Vec::with_capacity(rows.len());
    let mut rejected = Vec::new();
    for row in rows {
        match scheme.label_of(row.timestamp) {
            Ok(time_label) => evaluations.push(Evaluation {
                evaluator: row.evaluator.clone(),
                worker: row.worker.clone(),
                value: row.value,
                timestamp: row.timestamp,
                time_label,
                credit: row.credit,
                source_row: row.line,
            }),
            Err(err) => rejected.push(RejectedRow { line: row.line, reason: err.to_string() }),
        }
    }
    (evaluations, rejected)
}

/// Election log ingestion against a caller-supplied interval scheme.
pub fn parse_wikilog(
    reader: impl Read,
    dialect: Dialect,
    scheme: &IntervalScheme,
) -> Result<IngestOutcome> {
    let parse = read_wiki_rows(reader, dialect)?;
    let (evaluations, mut labeling_rejects) = wiki_to_evaluations(&parse.rows, scheme);
    let mut rejected = parse.rejected;
    rejected.append(&mut labeling_rejects);
    Ok(IngestOutcome { evaluations, rejected, warnings: parse.warnings })
}

/// Generic format ingestion against a caller-supplied interval scheme.
pub fn parse_generic(
    reader: impl Read,
    scheme: &IntervalScheme,
    scale_max: f64,
) -> Result<IngestOutcome> {
    let parse = read_generic_rows(reader, scale_max)?;
    let (evaluations, mut labeling_rejects) = generic_to_evaluations(&parse.rows, scheme);
    let mut rejected = parse.rejected;
    rejected.append(&mut labeling_rejects);
    Ok(IngestOutcome { evaluations, rejected, warnings: parse.warnings })
}

/// Election log ingestion with the epoch derived from the data: the start of
/// the day containing the earliest accepted vote time. Fails if no record
/// survives validation.
pub fn ingest_wikilog(
    reader: impl Read,
    dialect: Dialect,
    width: IntervalWidth,
) -> Result<(IngestOutcome, IntervalScheme)> {
    let parse = read_wiki_rows(reader, dialect)?;
    let earliest = parse
        .rows
        .iter()
        .map(|r| r.vote_time)
        .min()
        .ok_or(Error::NoRecords)?;
    let scheme = IntervalScheme::starting_at_day(earliest, width);
    let (evaluations, mut labeling_rejects) = wiki_to_evaluations(&parse.rows, &scheme);
    let mut rejected = parse.rejected;
    rejected.append(&mut labeling_rejects);
    Ok((IngestOutcome { evaluations, rejected, warnings: parse.warnings }, scheme))
}

/// Generic format ingestion with the epoch derived from the data.
pub fn ingest_generic(
    reader: impl Read,
    width: IntervalWidth,
    scale_max: f64,
) -> Result<(IngestOutcome, IntervalScheme)> {
    let parse = read_generic_rows(reader, scale_max)?;
    let earliest = parse
        .rows
        .iter()
        .map(|r| r.timestamp)
        .min()
        .ok_or(Error::NoRecords)?;
    let scheme = IntervalScheme::starting_at_day(earliest, width);
    let (evaluations, mut labeling_rejects) = generic_to_evaluations(&parse.rows, &scheme);
    let mut rejected = parse.rejected;
    rejected.append(&mut labeling_rejects);
    Ok((IngestOutcome { evaluations, rejected, warnings: parse.warnings }, scheme))
}

/// Writes evaluations in the generic format, credit column included.
/// Numbers are written with full round-trip precision.
pub fn serialize_generic(evaluations: &[Evaluation], writer: impl Write) -> Result<()> {
    let mut csv_writer = csv::Writer::from_writer(writer);
    csv_writer.write_record(GENERIC_HEADER)?;
    for e in evaluations {
        csv_writer.write_record([
            e.evaluator.as_str(),
            e.worker.as_str(),
            &e.value.to_string(),
            &e.timestamp.format("%Y-%m-%d %H:%M:%S").to_string(),
            &e.credit.to_string(),
        ])?;
    }
    csv_writer.flush()?;
    Ok(())
}

/// Removes evaluations where an actor rated themselves. Returns the kept
/// evaluations and the number dropped.
pub fn drop_self_votes(evaluations: Vec<Evaluation>) -> (Vec<Evaluation>, usize) {
    let before = evaluations.len();
    let kept: Vec<Evaluation> = evaluations
        .into_iter()
        .filter(|e| e.evaluator != e.worker)
        .collect();
    let dropped = before - kept.len();
    (kept, dropped)
}

/// Largest interval label present, if any.
pub fn max_label(evaluations: &[Evaluation]) -> Option<u32> {
    evaluations.iter().map(|e| e.time_label).max()
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn ts(s: &str) -> NaiveDateTime {
        parse_timestamp(s).unwrap()
    }

    #[test]
    fn timestamp_formats() {
        let want = NaiveDate::from_ymd_opt(2004, 9, 14)
            .unwrap()
            .and_hms_opt(22, 51, 0)
            .unwrap();
        assert_eq!(parse_timestamp("2004-09-14 22:51:00").unwrap(), want);
        assert_eq!(parse_timestamp("2004-09-14T22:51:00").unwrap(), want);
        assert_eq!(parse_timestamp("2004-09-14T22:51:00Z").unwrap(), want);
        assert_eq!(parse_timestamp("2004-09-14 22:51:00.250").unwrap().date(), want.date());
        assert!(parse_timestamp("14/09/2004").is_none());
        assert!(parse_timestamp("").is_none());
    }

    #[test]
    fn labels_count_from_one_at_the_epoch() {
        let scheme = IntervalScheme::new(ts("2004-01-01 00:00:00"), IntervalWidth::HALF_YEAR);
        assert_eq!(scheme.label_of(ts("2004-01-01 00:00:00")).unwrap(), 1);
        assert_eq!(scheme.label_of(ts("2004-06-30 00:00:00")).unwrap(), 1);
        assert_eq!(scheme.label_of(ts("2004-07-02 00:00:00")).unwrap(), 2);
        // 4 years on a half-year grid lands in the 8th interval.
        assert_eq!(scheme.label_of(ts("2007-12-31 23:59:59")).unwrap(), 8);
        assert!(matches!(
            scheme.label_of(ts("2003-12-31 23:59:59")),
            Err(Error::BeforeEpoch(_))
        ));
    }

    #[test]
    fn label_at_exact_interval_boundary_starts_the_next_interval() {
        let scheme = IntervalScheme::new(ts("2010-01-01 00:00:00"), IntervalWidth::DAY);
        assert_eq!(scheme.label_of(ts("2010-01-01 23:59:59")).unwrap(), 1);
        assert_eq!(scheme.label_of(ts("2010-01-02 00:00:00")).unwrap(), 2);
    }

    const WIKI_SAMPLE: &str = "\
2004-09-15 03:12:44\tSennheiser\ttaoster\t0\t101\tGrunt\t1\t2004-09-14 22:51:00
2004-09-15 03:12:44\tSennheiser\ttaoster\t0\t102\tNova\t-1\t2004-09-14 23:33:00
2004-09-15 03:12:44\tSennheiser\ttaoster\t0\t103\tMiro\t0\t2004-09-15 01:02:03
not-a-time\tSennheiser\ttaoster\t0\t104\tPax\t1\t2004-09-14 22:51:00
2004-09-15 03:12:44\tSennheiser\ttaoster\t0\t105\tIvy\t7\t2004-09-14 22:51:00
2004-09-15 03:12:44\tSennheiser\ttaoster\t0\t106\tOak\t1
";

    #[test]
    fn wiki_rows_parse_and_reject_with_line_numbers() {
        let parse = read_wiki_rows(WIKI_SAMPLE.as_bytes(), Dialect::Tab).unwrap();
        assert_eq!(parse.rows.len(), 3);
        assert_eq!(parse.rejected.len(), 3);
        assert_eq!(parse.rows[0].voter, "Grunt");
        assert_eq!(parse.rows[0].value(), 3.0);
        assert_eq!(parse.rows[1].value(), 1.0);
        assert_eq!(parse.rows[2].value(), 2.0);
        let lines: Vec<u64> = parse.rejected.iter().map(|r| r.line).collect();
        assert_eq!(lines, vec![4, 5, 6]);
        assert!(parse.rejected[0].reason.contains("close time"));
        assert!(parse.rejected[1].reason.contains("vote"));
        assert!(parse.rejected[2].reason.contains("fields"));
    }

    #[test]
    fn wiki_comma_dialect() {
        let text = "2004-09-15 03:12:44,Sen,tao,1,101,Grunt,1,2004-09-14 22:51:00\n";
        let parse = read_wiki_rows(text.as_bytes(), Dialect::Comma).unwrap();
        assert_eq!(parse.rows.len(), 1);
        assert_eq!(parse.rows[0].nominee, "tao");
    }

    #[test]
    fn generic_rows_parse_with_optional_credit() {
        let text = "\
evaluator,worker,value,timestamp,credit
alice,bob,2.5,2010-03-01 12:00:00,2
carol,bob,3,2010-03-02 12:00:00,
dave,bob,9,2010-03-03 12:00:00,1
erin,bob,1,2010-03-04 12:00:00,-4
frank,bob,1,bad-stamp,1
";
        let parse = read_generic_rows(text.as_bytes(), 3.0).unwrap();
        assert_eq!(parse.rows.len(), 2);
        assert_eq!(parse.rows[0].credit, 2.0);
        assert_eq!(parse.rows[1].credit, 1.0);
        let reasons: Vec<&str> = parse.rejected.iter().map(|r| r.reason.as_str()).collect();
        assert_eq!(parse.rejected.len(), 3);
        assert!(reasons[0].contains("scale"));
        assert!(reasons[1].contains("credit"));
        assert!(reasons[2].contains("timestamp"));
        assert_eq!(parse.rejected[0].line, 4);
    }

    #[test]
    fn generic_header_without_credit_column() {
        let text = "evaluator,worker,value,timestamp\na,b,1,2010-01-01 00:00:00\n";
        let parse = read_generic_rows(text.as_bytes(), 3.0).unwrap();
        assert_eq!(parse.rows.len(), 1);
        assert_eq!(parse.rows[0].credit, 1.0);
    }

    #[test]
    fn generic_rejects_unknown_header() {
        let text = "who,whom,score,when\na,b,1,2010-01-01 00:00:00\n";
        let err = read_generic_rows(text.as_bytes(), 3.0).unwrap_err();
        assert!(matches!(err, Error::Malformed { line: 1, .. }));
    }

    #[test]
    fn empty_input_warns_instead_of_failing() {
        let parse = read_generic_rows("evaluator,worker,value,timestamp\n".as_bytes(), 3.0)
            .unwrap();
        assert!(parse.rows.is_empty());
        assert_eq!(parse.warnings.len(), 1);
    }

    #[test]
    fn ingest_derives_epoch_from_earliest_day() {
        let text = "\
evaluator,worker,value,timestamp
alice,bob,2,2010-03-05 13:45:00
carol,bob,3,2010-03-04 18:00:00
";
        let (outcome, scheme) =
            ingest_generic(text.as_bytes(), IntervalWidth::DAY, 3.0).unwrap();
        assert_eq!(scheme.epoch(), ts("2010-03-04 00:00:00"));
        assert_eq!(outcome.evaluations.len(), 2);
        assert_eq!(outcome.evaluations[0].time_label, 2);
        assert_eq!(outcome.evaluations[1].time_label, 1);
    }

    #[test]
    fn ingest_with_nothing_usable_is_an_error() {
        let text = "evaluator,worker,value,timestamp\n";
        assert!(matches!(
            ingest_generic(text.as_bytes(), IntervalWidth::DAY, 3.0),
            Err(Error::NoRecords)
        ));
    }

    #[test]
    fn serialize_then_reparse_round_trips() {
        let text = "\
evaluator,worker,value,timestamp,credit
alice,bob,2.5,2010-03-01 12:00:00,2
carol,bob,0.125,2010-03-02 12:00:00,1.5
";
        let scheme = IntervalScheme::new(ts("2010-03-01 00:00:00"), IntervalWidth::DAY);
        let first = parse_generic(text.as_bytes(), &scheme, 3.0).unwrap();
        let mut buf = Vec::new();
        serialize_generic(&first.evaluations, &mut buf).unwrap();
        let second = parse_generic(buf.as_slice(), &scheme, 3.0).unwrap();
        assert_eq!(first.evaluations.len(), second.evaluations.len());
        for (a, b) in first.evaluations.iter().zip(&second.evaluations) {
            assert_eq!(a.evaluator, b.evaluator);
            assert_eq!(a.value, b.value);
            assert_eq!(a.timestamp, b.timestamp);
            assert_eq!(a.credit, b.credit);
        }
    }

    #[test]
    fn self_votes_can_be_dropped() {
        let scheme = IntervalScheme::new(ts("2010-01-01 00:00:00"), IntervalWidth::DAY);
        let text = "\
evaluator,worker,value,timestamp
alice,alice,3,2010-01-01 10:00:00
alice,bob,2,2010-01-01 11:00:00
";
        let outcome = parse_generic(text.as_bytes(), &scheme, 3.0).unwrap();
        let (kept, dropped) = drop_self_votes(outcome.evaluations);
        assert_eq!(dropped, 1);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].worker, "bob");
    }
}

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::record::{Event, RoundRecord, SecurityReport, Transcript};
use crate::error::{QssError, Result};

pub const TRANSCRIPT_SCHEMA: &str = "qss-transcript/1";

/// One line of a transcript file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "line", rename_all = "snake_case")]
pub enum TranscriptLine {
    Header { schema: String, rounds: u64, events: u64 },
    Event(Event),
    Round(RoundRecord),
    Report(Box<SecurityReport>),
}

fn json_err(e: serde_json::Error) -> QssError {
    QssError::Validation(format!("transcript json: {e}"))
}

fn write_line<W: Write>(w: &mut W, line: &TranscriptLine) -> Result<()> {
    serde_json::to_writer(&mut *w, line).map_err(json_err)?;
    w.write_all(b"\n").map_err(|e| QssError::Internal(format!("write failed: {e}")))
}

/// Line-delimited transcript: a schema header, every event in sequence
/// order, every round record, then the report.
pub fn write_transcript_jsonl<W: Write>(transcript: &Transcript, mut w: W) -> Result<()> {
    write_line(
        &mut w,
        &TranscriptLine::Header {
            schema: TRANSCRIPT_SCHEMA.to_string(),
            rounds: transcript.records.len() as u64,
            events: transcript.events.len() as u64,
        },
    )?;
    for e in &transcript.events {
        write_line(&mut w, &TranscriptLine::Event(e.clone()))?;
    }
    for r in &transcript.records {
        write_line(&mut w, &TranscriptLine::Round(r.clone()))?;
    }
    write_line(&mut w, &TranscriptLine::Report(Box::new(transcript.report.clone())))?;
    w.flush().map_err(|e| QssError::Internal(format!("flush failed: {e}")))
}

pub fn read_transcript_jsonl<R: BufRead>(r: R) -> Result<Transcript> {
    let mut lines = r.lines();
    let first = lines
        .next()
        .ok_or_else(|| QssError::Validation("empty transcript".into()))?
        .map_err(|e| QssError::Validation(format!("read failed: {e}")))?;
    match serde_json::from_str(&first).map_err(json_err)? {
        TranscriptLine::Header { schema, .. } if schema == TRANSCRIPT_SCHEMA => {}
        TranscriptLine::Header { schema, .. } => {
            return Err(QssError::Validation(format!("unsupported transcript schema '{schema}'")))
        }
        _ => return Err(QssError::Validation("transcript does not start with a header".into())),
    }
    let mut events = Vec::new();
    let mut records = Vec::new();
    let mut report = None;
    for line in lines {
        let line = line.map_err(|e| QssError::Validation(format!("read failed: {e}")))?;
        if line.is_empty() {
            continue;
        }
        match serde_json::from_str(&line).map_err(json_err)? {
            TranscriptLine::Header { .. } => return Err(QssError::Validation("duplicate header".into())),
            TranscriptLine::Event(e) => events.push(e),
            TranscriptLine::Round(r) => records.push(r),
            TranscriptLine::Report(r) => report = Some(*r),
        }
    }
    let report = report.ok_or_else(|| QssError::Validation("transcript has no report".into()))?;
    Ok(Transcript { events, records, report })
}

/// Pretty-printed report.
pub fn write_summary_json<W: Write>(report: &SecurityReport, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, report).map_err(json_err)?;
    w.write_all(b"\n").map_err(|e| QssError::Internal(format!("write failed: {e}")))
}

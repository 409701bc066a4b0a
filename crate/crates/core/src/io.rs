//! Trajectory files: CSV with a `time_s,roll_deg,pitch_deg,yaw_deg` header.
//! Angles are stored in degrees and held in radians in memory.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::trajectory::TimedRecord;

pub const TRAJECTORY_HEADER: [&str; 4] = ["time_s", "roll_deg", "pitch_deg", "yaw_deg"];

fn parse_error(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parses a trajectory from CSV text. Line numbers in errors are 1-based.
pub fn parse_trajectory(text: &str) -> Result<TimedRecord> {
    read_trajectory(text.as_bytes())
}

pub fn read_trajectory<R: Read>(reader: R) -> Result<TimedRecord> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut rec = TimedRecord::default();
    let mut saw_header = false;
    for row in rdr.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(line, e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line());
        if !saw_header {
            let fields: Vec<&str> = row.iter().collect();
            if fields != TRAJECTORY_HEADER {
                return Err(parse_error(
                    line,
                    format!("expected header {:?}, found {:?}", TRAJECTORY_HEADER.join(","), fields.join(",")),
                ));
            }
            saw_header = true;
            continue;
        }
        if row.len() != 4 {
            return Err(parse_error(line, format!("expected 4 fields, found {}", row.len())));
        }
        let mut v = [0.0f64; 4];
        for (k, field) in row.iter().enumerate() {
            v[k] = field
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| parse_error(line, format!("{} is not a finite number: {field:?}", TRAJECTORY_HEADER[k])))?;
        }
        if let Some(&prev) = rec.times.last() {
            if v[0] <= prev {
                return Err(parse_error(line, format!("time {} does not increase past {prev}", v[0])));
            }
        }
        rec.times.push(v[0]);
        rec.roll.push(v[1].to_radians());
        rec.pitch.push(v[2].to_radians());
        rec.yaw.push(v[3].to_radians());
    }
    if !saw_header {
        return Err(parse_error(1, "empty trajectory file"));
    }
    Ok(rec)
}

pub fn load_trajectory(path: &Path) -> Result<TimedRecord> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_trajectory(std::io::BufReader::new(file)).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

pub fn write_trajectory<W: Write>(record: &TimedRecord, out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRAJECTORY_HEADER)?;
    for i in 0..record.len() {
        w.write_record([
            format!("{:.12e}", record.times[i]),
            format!("{:.12e}", record.roll[i].to_degrees()),
            format!("{:.12e}", record.pitch[i].to_degrees()),
            format!("{:.12e}", record.yaw[i].to_degrees()),
        ])?;
    }
    w.flush()
}

pub fn save_trajectory(record: &TimedRecord, path: &Path) -> Result<()> {
    record.validate()?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_trajectory(record, std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

/// Writes rows of numbers under a header, for spectra and run histories.
pub fn save_table<S: AsRef<str>>(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<S>>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let wrap = |e: csv::Error| Error::io(path, std::io::Error::other(e));
    w.write_record(header).map_err(wrap)?;
    for row in rows {
        w.write_record(row.iter().map(|s| s.as_ref())).map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_values() {
        let rec = TimedRecord {
            times: vec![0.0, 0.01, 0.025],
            roll: vec![0.1, -0.2, 0.3],
            pitch: vec![0.0, 1e-7, -1.0],
            yaw: vec![2.0, 2.5, 3.0],
        };
        let mut buf = Vec::new();
        write_trajectory(&rec, &mut buf).unwrap();
        let back = parse_trajectory(std::str::from_utf8(&buf).unwrap()).unwrap();
        for (a, b) in rec.channels().iter().zip(back.channels()) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() < 1e-12 * x.abs().max(1.0));
            }
        }
        assert_eq!(rec.times, back.times);
    }

    #[test]
    fn errors_name_the_line() {
        let bad = "time_s,roll_deg,pitch_deg,yaw_deg\n0,0,0,0\n0.1,x,0,0\n";
        match parse_trajectory(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let backwards = "time_s,roll_deg,pitch_deg,yaw_deg\n0.2,0,0,0\n0.1,0,0,0\n";
        assert!(matches!(parse_trajectory(backwards), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_trajectory("t,r,p,y\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_trajectory(""), Err(Error::Parse { .. })));
        let short = "time_s,roll_deg,pitch_deg,yaw_deg\n0,0,0\n";
        assert!(matches!(parse_trajectory(short), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn nan_and_inf_rejected() {
        let t = "time_s,roll_deg,pitch_deg,yaw_deg\n0,NaN,0,0\n";
        assert!(parse_trajectory(t).is_err());
        let t = "time_s,roll_deg,pitch_deg,yaw_deg\n0,inf,0,0\n";
        assert!(parse_trajectory(t).is_err());
    }
}

//! inD-style CSV ingestion and export.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use csv::StringRecord;
use log::warn;

use crate::error::DatasetError;
use crate::geometry::{wrap_angle, Vec2};

use super::kinematics::derive_kinematics;
use super::types::{Recording, RoadUserClass, Track, TrackId, TrackState, VRU_FOOTPRINT_RADIUS};

pub const TRACK_COLUMNS: [&str; 12] = [
    "recordingId",
    "trackId",
    "frame",
    "xCenter",
    "yCenter",
    "heading",
    "width",
    "length",
    "xVelocity",
    "yVelocity",
    "xAcceleration",
    "yAcceleration",
];
pub const TRACK_META_COLUMNS: [&str; 8] =
    ["recordingId", "trackId", "initialFrame", "finalFrame", "numFrames", "width", "length", "class"];
pub const RECORDING_META_COLUMNS: [&str; 4] = ["recordingId", "locationId", "frameRate", "duration"];

/// Used when an `unknown` object ships without usable dimensions.
const FALLBACK_LENGTH: f64 = 4.5;
const FALLBACK_WIDTH: f64 = 1.8;

struct Table {
    file: PathBuf,
    columns: HashMap<String, usize>,
    rows: Vec<StringRecord>,
}

impl Table {
    fn read(path: &Path, required: &[&str]) -> Result<Table, DatasetError> {
        let file = path.to_path_buf();
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|source| DatasetError::Csv { file: file.clone(), source })?;
        let headers = rdr.headers().map_err(|source| DatasetError::Csv { file: file.clone(), source })?;
        let columns: HashMap<String, usize> = headers.iter().enumerate().map(|(i, h)| (h.to_string(), i)).collect();
        for name in required {
            if !columns.contains_key(*name) {
                return Err(DatasetError::MissingColumn { file, name: (*name).to_string() });
            }
        }
        let rows = rdr
            .records()
            .collect::<Result<Vec<_>, _>>()
            .map_err(|source| DatasetError::Csv { file: file.clone(), source })?;
        Ok(Table { file, columns, rows })
    }

    fn has(&self, column: &str) -> bool {
        self.columns.contains_key(column)
    }

    fn str(&self, row: usize, column: &str) -> &str {
        self.rows[row].get(self.columns[column]).unwrap_or("")
    }

    fn parse<T: std::str::FromStr>(&self, row: usize, column: &str) -> Result<T, DatasetError> {
        let raw = self.str(row, column);
        raw.parse::<T>().map_err(|_| DatasetError::UnitParse {
            file: self.file.clone(),
            // 1-based, counting the header line
            row: row + 2,
            column: column.to_string(),
            value: raw.to_string(),
        })
    }
}

struct TrackMeta {
    width: f64,
    length: f64,
    class: RoadUserClass,
}

/// Load one recording from its tracks, tracks-meta and recording-meta files.
/// Headings are converted to radians, speed is recomputed from the velocity
/// components and yaw rate and sideslip are derived.
pub fn load_recording(
    tracks_path: impl AsRef<Path>,
    tracks_meta_path: impl AsRef<Path>,
    recording_meta_path: impl AsRef<Path>,
) -> Result<Recording, DatasetError> {
    let rec_meta = Table::read(recording_meta_path.as_ref(), &RECORDING_META_COLUMNS)?;
    if rec_meta.rows.is_empty() {
        return Err(DatasetError::EmptyRecordingMeta(rec_meta.file));
    }
    let recording_id: u32 = rec_meta.parse(0, "recordingId")?;
    let location_id = rec_meta.str(0, "locationId").to_string();
    let frame_rate: f64 = rec_meta.parse(0, "frameRate")?;
    let duration: f64 = rec_meta.parse(0, "duration")?;
    if !(frame_rate > 0.0 && frame_rate.is_finite()) {
        return Err(DatasetError::InvalidFrameRate(frame_rate));
    }

    let meta_table = Table::read(tracks_meta_path.as_ref(), &TRACK_META_COLUMNS)?;
    let mut metas: HashMap<TrackId, TrackMeta> = HashMap::new();
    for row in 0..meta_table.rows.len() {
        let id: TrackId = meta_table.parse(row, "trackId")?;
        let raw_class = meta_table.str(row, "class");
        let class = RoadUserClass::parse(raw_class).unwrap_or_else(|| {
            warn!("track {id}: unrecognized class `{raw_class}`, using `unknown`");
            RoadUserClass::Unknown
        });
        metas.insert(
            id,
            TrackMeta { width: meta_table.parse(row, "width")?, length: meta_table.parse(row, "length")?, class },
        );
    }

    let table = Table::read(tracks_path.as_ref(), &TRACK_COLUMNS)?;
    let body_frame_accel = table.has("lonAcceleration") && table.has("latAcceleration");
    let mut grouped: BTreeMap<TrackId, Vec<TrackState>> = BTreeMap::new();
    for row in 0..table.rows.len() {
        let id: TrackId = table.parse(row, "trackId")?;
        let frame: u32 = table.parse(row, "frame")?;
        let position = Vec2::new(table.parse(row, "xCenter")?, table.parse(row, "yCenter")?);
        let heading_deg: f64 = table.parse(row, "heading")?;
        let heading = wrap_angle(heading_deg.to_radians());
        let velocity = Vec2::new(table.parse(row, "xVelocity")?, table.parse(row, "yVelocity")?);
        let (accel_lon, accel_lat) = if body_frame_accel {
            (table.parse(row, "lonAcceleration")?, table.parse(row, "latAcceleration")?)
        } else {
            let a = Vec2::new(table.parse(row, "xAcceleration")?, table.parse(row, "yAcceleration")?);
            let fwd = Vec2::from_angle(heading);
            (a.dot(fwd), a.dot(Vec2::new(-fwd.y, fwd.x)))
        };
        grouped.entry(id).or_default().push(TrackState {
            frame,
            t: frame as f64 / frame_rate,
            position,
            heading,
            speed: velocity.norm(),
            velocity,
            accel_lon,
            accel_lat,
            yaw_rate: 0.0,
            sideslip: 0.0,
        });
    }

    let mut tracks = Vec::with_capacity(grouped.len());
    for (id, mut states) in grouped {
        states.sort_by_key(|s| s.frame);
        if states.windows(2).any(|w| w[1].frame != w[0].frame + 1) {
            return Err(DatasetError::NonContiguousFrames(id));
        }
        let meta = metas.get(&id).ok_or(DatasetError::MissingTrackMeta(id))?;
        let (mut width, mut length) = (meta.width, meta.length);
        let footprint_radius = meta.class.is_vru().then_some(VRU_FOOTPRINT_RADIUS);
        if !meta.class.is_vru() && !(width > 0.0 && length > 0.0) {
            if meta.class == RoadUserClass::Unknown {
                warn!("track {id}: unknown object without dimensions, assuming {FALLBACK_LENGTH}x{FALLBACK_WIDTH} m");
                width = FALLBACK_WIDTH;
                length = FALLBACK_LENGTH;
            } else {
                return Err(DatasetError::InvalidDimensions(id));
            }
        }
        let track =
            Track { track_id: id, class: meta.class, width, length, states, footprint_radius, accel_from_source: true };
        tracks.push(derive_kinematics(track, frame_rate));
    }

    Ok(Recording { recording_id, location_id, frame_rate, duration, tracks })
}

fn io_err(file: &Path) -> impl Fn(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io { file: file.to_path_buf(), source }
}

/// Write a recording back to the three CSV files. Body-frame accelerations
/// are written alongside the world-frame ones so a reload reproduces them.
pub fn write_recording(
    rec: &Recording,
    tracks_path: impl AsRef<Path>,
    tracks_meta_path: impl AsRef<Path>,
    recording_meta_path: impl AsRef<Path>,
) -> Result<(), DatasetError> {
    let tp = tracks_path.as_ref();
    let mut w = std::io::BufWriter::new(File::create(tp).map_err(io_err(tp))?);
    writeln!(w, "{},lonAcceleration,latAcceleration", TRACK_COLUMNS.join(",")).map_err(io_err(tp))?;
    for tr in &rec.tracks {
        for s in &tr.states {
            let fwd = Vec2::from_angle(s.heading);
            let left = Vec2::new(-fwd.y, fwd.x);
            let a = fwd * s.accel_lon + left * s.accel_lat;
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                rec.recording_id,
                tr.track_id,
                s.frame,
                s.position.x,
                s.position.y,
                s.heading.to_degrees(),
                tr.width,
                tr.length,
                s.velocity.x,
                s.velocity.y,
                a.x,
                a.y,
                s.accel_lon,
                s.accel_lat
            )
            .map_err(io_err(tp))?;
        }
    }
    w.flush().map_err(io_err(tp))?;

    let mp = tracks_meta_path.as_ref();
    let mut w = std::io::BufWriter::new(File::create(mp).map_err(io_err(mp))?);
    writeln!(w, "{}", TRACK_META_COLUMNS.join(",")).map_err(io_err(mp))?;
    for tr in &rec.tracks {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            rec.recording_id,
            tr.track_id,
            tr.first_frame(),
            tr.last_frame(),
            tr.states.len(),
            tr.width,
            tr.length,
            tr.class.as_str()
        )
        .map_err(io_err(mp))?;
    }
    w.flush().map_err(io_err(mp))?;

    let rp = recording_meta_path.as_ref();
    let mut w = File::create(rp).map_err(io_err(rp))?;
    writeln!(w, "{}", RECORDING_META_COLUMNS.join(",")).map_err(io_err(rp))?;
    writeln!(w, "{},{},{},{}", rec.recording_id, rec.location_id, rec.frame_rate, rec.duration).map_err(io_err(rp))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;
    use std::fs;

    const TRACKS: &str = "recordingId,trackId,frame,xCenter,yCenter,heading,width,length,xVelocity,yVelocity,xAcceleration,yAcceleration\n\
        21,0,0,10.0,5.0,450.0,1.8,4.5,0.0,3.0,0.0,0.0\n\
        21,0,1,10.0,5.12,450.0,1.8,4.5,0.0,3.0,0.0,0.0\n\
        21,0,2,10.0,5.24,450.0,1.8,4.5,0.0,3.0,0.0,0.0\n";
    const META: &str =
        "recordingId,trackId,initialFrame,finalFrame,numFrames,width,length,class\n21,0,0,2,3,1.8,4.5,car\n";
    const REC: &str = "recordingId,locationId,frameRate,duration\n21,4,25.0,0.12\n";

    fn write_triple(dir: &Path, tracks: &str, meta: &str, rec: &str) -> (PathBuf, PathBuf, PathBuf) {
        let t = dir.join("tracks.csv");
        let m = dir.join("tracksMeta.csv");
        let r = dir.join("recordingMeta.csv");
        fs::write(&t, tracks).unwrap();
        fs::write(&m, meta).unwrap();
        fs::write(&r, rec).unwrap();
        (t, m, r)
    }

    #[test]
    fn minimal_triple_loads() {
        let dir = tempfile::tempdir().unwrap();
        let (t, m, r) = write_triple(dir.path(), TRACKS, META, REC);
        let rec = load_recording(t, m, r).unwrap();
        assert_eq!(rec.tracks.len(), 1);
        assert_eq!(rec.tracks[0].states.len(), 3);
        assert_eq!(rec.location_id, "4");
        let s = &rec.tracks[0].states[1];
        assert!((s.heading - FRAC_PI_2).abs() < 1e-12);
        assert!((s.speed - 3.0).abs() < 1e-12);
        assert!(s.sideslip.abs() < 1e-9);
    }

    #[test]
    fn missing_column_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let broken = TRACKS.replacen("xVelocity", "xVel", 1);
        let (t, m, r) = write_triple(dir.path(), &broken, META, REC);
        match load_recording(t, m, r) {
            Err(DatasetError::MissingColumn { name, .. }) => assert_eq!(name, "xVelocity"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn frame_gap_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let gapped = TRACKS.replace("21,0,2,", "21,0,3,");
        let (t, m, r) = write_triple(dir.path(), &gapped, META, REC);
        assert!(matches!(load_recording(t, m, r), Err(DatasetError::NonContiguousFrames(0))));
    }

    #[test]
    fn garbage_number_reports_row() {
        let dir = tempfile::tempdir().unwrap();
        let bad = TRACKS.replace("5.12", "five");
        let (t, m, r) = write_triple(dir.path(), &bad, META, REC);
        match load_recording(t, m, r) {
            Err(DatasetError::UnitParse { row, column, .. }) => {
                assert_eq!(row, 3);
                assert_eq!(column, "yCenter");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_class_falls_back() {
        let dir = tempfile::tempdir().unwrap();
        let meta = META.replace(",car", ",hovercraft");
        let (t, m, r) = write_triple(dir.path(), TRACKS, &meta, REC);
        let rec = load_recording(t, m, r).unwrap();
        assert_eq!(rec.tracks[0].class, RoadUserClass::Unknown);
    }

    #[test]
    fn pedestrian_gets_disc_footprint() {
        let dir = tempfile::tempdir().unwrap();
        let meta = META.replace(",1.8,4.5,car", ",0.0,0.0,pedestrian");
        let (t, m, r) = write_triple(dir.path(), TRACKS, &meta, REC);
        let rec = load_recording(t, m, r).unwrap();
        assert_eq!(rec.tracks[0].footprint_radius, Some(VRU_FOOTPRINT_RADIUS));
    }
}

//! Loading, validating and cross-linking the input tables.
//!
//! A [`Dataset`] is built once and never mutated. Rows that break a record
//! invariant are skipped and reported in [`IngestReport`]; with
//! [`LoadOptions::strict`] the first such row aborts the load instead.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use chrono::{NaiveDate, NaiveDateTime, NaiveTime};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{EcoregionAdjacency, Params};

pub const PORT_COLUMNS: [&str; 9] = [
    "port_id",
    "name",
    "country",
    "region_id",
    "lat",
    "lon",
    "temperature_c",
    "salinity_ppt",
    "ecoregion_id",
];
pub const VOYAGE_COLUMNS: [&str; 9] = [
    "voyage_id",
    "vessel_id",
    "vessel_type",
    "dwt",
    "origin_port",
    "dest_port",
    "sail_date",
    "arrival_date",
    "discharge_tonnes",
];
pub const REGION_COLUMNS: [&str; 5] = [
    "region_id",
    "region_name",
    "gdp_per_capita_usd",
    "is_sids",
    "is_ldc",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VesselType {
    Containership,
    Bulker,
    Tanker,
    Other,
}

impl VesselType {
    pub const ALL: [VesselType; 4] = [
        VesselType::Containership,
        VesselType::Bulker,
        VesselType::Tanker,
        VesselType::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            VesselType::Containership => "containership",
            VesselType::Bulker => "bulker",
            VesselType::Tanker => "tanker",
            VesselType::Other => "other",
        }
    }
}

impl fmt::Display for VesselType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VesselType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "containership" => Ok(VesselType::Containership),
            "bulker" => Ok(VesselType::Bulker),
            "tanker" => Ok(VesselType::Tanker),
            "other" => Ok(VesselType::Other),
            other => Err(format!("unknown vessel type `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortRecord {
    pub port_id: String,
    pub name: String,
    pub country: String,
    pub region_id: String,
    pub latitude: f64,
    pub longitude: f64,
    /// Annual mean surface temperature, °C.
    pub temperature: f64,
    /// Annual mean surface salinity, ppt.
    pub salinity: f64,
    pub ecoregion_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoyageRecord {
    pub voyage_id: String,
    pub vessel_id: String,
    pub vessel_type: VesselType,
    pub dwt: f64,
    pub origin_port: String,
    pub dest_port: String,
    pub sail: NaiveDateTime,
    pub arrival: NaiveDateTime,
    /// Ballast water discharged at `dest_port`, tonnes.
    pub discharge_tonnes: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionRecord {
    pub region_id: String,
    pub region_name: String,
    pub gdp_per_capita_usd: f64,
    pub is_sids: bool,
    pub is_ldc: bool,
}

/// Voyage length in (possibly fractional) days.
pub fn voyage_duration(v: &VoyageRecord) -> f64 {
    (v.arrival - v.sail).num_seconds() as f64 / 86_400.0
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Rejection {
    pub file: String,
    pub row: u64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub regions_kept: usize,
    pub ports_kept: usize,
    pub voyages_kept: usize,
    pub rejections: Vec<Rejection>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Abort on the first rejected row.
    pub strict: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct InputFiles<'a> {
    pub ports: &'a Path,
    pub voyages: &'a Path,
    pub regions: &'a Path,
    /// Optional `params.json`; defaults apply when absent.
    pub params: Option<&'a Path>,
}

/// Validated, cross-linked input tables.
///
/// Ports and regions are held sorted by id; voyages keep their input order.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    ports: Vec<PortRecord>,
    port_index: BTreeMap<String, usize>,
    voyages: Vec<VoyageRecord>,
    regions: Vec<RegionRecord>,
    params: Params,
    report: IngestReport,
}

impl Dataset {
    /// Validates in-memory records the same way [`load_dataset`] validates
    /// file rows. Row numbers in the report are 1-based positions.
    pub fn from_parts(
        ports: Vec<PortRecord>,
        voyages: Vec<VoyageRecord>,
        regions: Vec<RegionRecord>,
        params: Params,
        opts: LoadOptions,
    ) -> Result<Dataset> {
        params.validate()?;
        let mut b = Builder::new(opts);
        for (i, r) in regions.into_iter().enumerate() {
            b.add_region(REGIONS_FILE, i as u64 + 1, Ok(r))?;
        }
        for (i, p) in ports.into_iter().enumerate() {
            b.add_port(PORTS_FILE, i as u64 + 1, Ok(p))?;
        }
        for (i, v) in voyages.into_iter().enumerate() {
            b.add_voyage(VOYAGES_FILE, i as u64 + 1, Ok(v))?;
        }
        b.finish(params)
    }

    pub fn ports(&self) -> &[PortRecord] {
        &self.ports
    }

    pub fn voyages(&self) -> &[VoyageRecord] {
        &self.voyages
    }

    pub fn regions(&self) -> &[RegionRecord] {
        &self.regions
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn ecoregions(&self) -> &EcoregionAdjacency {
        &self.params.neighbor_ecoregions
    }

    pub fn report(&self) -> &IngestReport {
        &self.report
    }

    /// Position of a port in [`Dataset::ports`].
    pub fn port_index(&self, port_id: &str) -> Option<usize> {
        self.port_index.get(port_id).copied()
    }

    pub fn port(&self, port_id: &str) -> Option<&PortRecord> {
        self.port_index(port_id).map(|i| &self.ports[i])
    }

    pub fn region(&self, region_id: &str) -> Option<&RegionRecord> {
        self.regions
            .binary_search_by(|r| r.region_id.as_str().cmp(region_id))
            .ok()
            .map(|i| &self.regions[i])
    }

    /// Voyages grouped per vessel, each group ordered by sail time, then
    /// arrival time, then voyage id.
    pub fn voyages_by_vessel(&self) -> BTreeMap<&str, Vec<&VoyageRecord>> {
        let mut groups: BTreeMap<&str, Vec<&VoyageRecord>> = BTreeMap::new();
        for v in &self.voyages {
            groups.entry(v.vessel_id.as_str()).or_default().push(v);
        }
        for list in groups.values_mut() {
            list.sort_by(|a, b| {
                (a.sail, a.arrival, &a.voyage_id).cmp(&(b.sail, b.arrival, &b.voyage_id))
            });
        }
        groups
    }

    /// Ports and their dataset index, grouped by region id.
    pub fn ports_by_region(&self) -> BTreeMap<&str, Vec<usize>> {
        let mut out: BTreeMap<&str, Vec<usize>> = self
            .regions
            .iter()
            .map(|r| (r.region_id.as_str(), Vec::new()))
            .collect();
        for (i, p) in self.ports.iter().enumerate() {
            out.entry(p.region_id.as_str()).or_default().push(i);
        }
        out
    }

    /// Hex SHA-256 over the canonical content of the dataset (records and
    /// ecoregion adjacency, not the model parameters).
    pub fn content_hash(&self) -> String {
        use sha2::{Digest, Sha256};

        #[derive(Serialize)]
        struct Canonical<'a> {
            ports: &'a [PortRecord],
            voyages: &'a [VoyageRecord],
            regions: &'a [RegionRecord],
            neighbor_ecoregions: &'a EcoregionAdjacency,
        }
        let bytes = serde_json::to_vec(&Canonical {
            ports: &self.ports,
            voyages: &self.voyages,
            regions: &self.regions,
            neighbor_ecoregions: &self.params.neighbor_ecoregions,
        })
        .expect("dataset serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

const PORTS_FILE: &str = "ports";
const VOYAGES_FILE: &str = "voyages";
const REGIONS_FILE: &str = "regions";

struct Builder {
    opts: LoadOptions,
    regions: BTreeMap<String, RegionRecord>,
    ports: BTreeMap<String, PortRecord>,
    voyages: Vec<VoyageRecord>,
    voyage_ids: BTreeSet<String>,
    report: IngestReport,
}

impl Builder {
    fn new(opts: LoadOptions) -> Self {
        Builder {
            opts,
            regions: BTreeMap::new(),
            ports: BTreeMap::new(),
            voyages: Vec::new(),
            voyage_ids: BTreeSet::new(),
            report: IngestReport::default(),
        }
    }

    fn reject(&mut self, file: &str, row: u64, err: Error) -> Result<()> {
        if self.opts.strict {
            return Err(err);
        }
        log::warn!("skipping {err}");
        self.report.rejections.push(Rejection {
            file: file.to_string(),
            row,
            reason: err.to_string(),
        });
        Ok(())
    }

    fn add_region(&mut self, file: &str, row: u64, parsed: Result<RegionRecord>) -> Result<()> {
        let r = match parsed.and_then(|r| check_region(file, row, &r).map(|_| r)) {
            Ok(r) => r,
            Err(e) => return self.reject(file, row, e),
        };
        if self.regions.contains_key(&r.region_id) {
            let e = Error::invariant(file, row, format!("duplicate region_id `{}`", r.region_id));
            return self.reject(file, row, e);
        }
        self.regions.insert(r.region_id.clone(), r);
        Ok(())
    }

    fn add_port(&mut self, file: &str, row: u64, parsed: Result<PortRecord>) -> Result<()> {
        let p = match parsed.and_then(|p| check_port(file, row, &p).map(|_| p)) {
            Ok(p) => p,
            Err(e) => return self.reject(file, row, e),
        };
        if !self.regions.contains_key(&p.region_id) {
            let e = Error::invariant(file, row, format!("unknown region_id `{}`", p.region_id));
            return self.reject(file, row, e);
        }
        if self.ports.contains_key(&p.port_id) {
            let e = Error::invariant(file, row, format!("duplicate port_id `{}`", p.port_id));
            return self.reject(file, row, e);
        }
        self.ports.insert(p.port_id.clone(), p);
        Ok(())
    }

    fn add_voyage(&mut self, file: &str, row: u64, parsed: Result<VoyageRecord>) -> Result<()> {
        let v = match parsed.and_then(|v| check_voyage(file, row, &v).map(|_| v)) {
            Ok(v) => v,
            Err(e) => return self.reject(file, row, e),
        };
        for port in [&v.origin_port, &v.dest_port] {
            if !self.ports.contains_key(port.as_str()) {
                let e = Error::UnknownPort {
                    file: file.to_string(),
                    row,
                    port: port.clone(),
                };
                return self.reject(file, row, e);
            }
        }
        if !self.voyage_ids.insert(v.voyage_id.clone()) {
            let e = Error::invariant(file, row, format!("duplicate voyage_id `{}`", v.voyage_id));
            return self.reject(file, row, e);
        }
        self.voyages.push(v);
        Ok(())
    }

    fn finish(self, params: Params) -> Result<Dataset> {
        if self.ports.is_empty() {
            return Err(Error::EmptyDataset(PORTS_FILE.into()));
        }
        if self.voyages.is_empty() {
            return Err(Error::EmptyDataset(VOYAGES_FILE.into()));
        }
        let mut report = self.report;
        report.regions_kept = self.regions.len();
        report.ports_kept = self.ports.len();
        report.voyages_kept = self.voyages.len();

        let ports: Vec<PortRecord> = self.ports.into_values().collect();
        let port_index = ports
            .iter()
            .enumerate()
            .map(|(i, p)| (p.port_id.clone(), i))
            .collect();
        Ok(Dataset {
            ports,
            port_index,
            voyages: self.voyages,
            regions: self.regions.into_values().collect(),
            params,
            report,
        })
    }
}

fn check_region(file: &str, row: u64, r: &RegionRecord) -> Result<()> {
    if r.region_id.trim().is_empty() {
        return Err(Error::invariant(file, row, "empty region_id"));
    }
    if !(r.gdp_per_capita_usd.is_finite() && r.gdp_per_capita_usd > 0.0) {
        return Err(Error::invariant(
            file,
            row,
            format!(
                "gdp_per_capita_usd must be > 0, got {}",
                r.gdp_per_capita_usd
            ),
        ));
    }
    Ok(())
}

fn check_port(file: &str, row: u64, p: &PortRecord) -> Result<()> {
    if p.port_id.trim().is_empty() {
        return Err(Error::invariant(file, row, "empty port_id"));
    }
    if !(p.country.len() == 3 && p.country.chars().all(|c| c.is_ascii_alphabetic())) {
        return Err(Error::invariant(
            file,
            row,
            format!("country must be an alpha-3 code, got `{}`", p.country),
        ));
    }
    if !(-90.0..=90.0).contains(&p.latitude) || !(-180.0..=180.0).contains(&p.longitude) {
        return Err(Error::invariant(file, row, "coordinates out of range"));
    }
    if !(-5.0..=45.0).contains(&p.temperature) {
        return Err(Error::invariant(
            file,
            row,
            format!("temperature {} outside [-5, 45] °C", p.temperature),
        ));
    }
    if !(0.0..=45.0).contains(&p.salinity) {
        return Err(Error::invariant(
            file,
            row,
            format!("salinity {} outside [0, 45] ppt", p.salinity),
        ));
    }
    if p.ecoregion_id.trim().is_empty() {
        return Err(Error::invariant(file, row, "empty ecoregion_id"));
    }
    Ok(())
}

fn check_voyage(file: &str, row: u64, v: &VoyageRecord) -> Result<()> {
    if v.voyage_id.trim().is_empty() || v.vessel_id.trim().is_empty() {
        return Err(Error::invariant(file, row, "empty voyage_id or vessel_id"));
    }
    if v.origin_port == v.dest_port {
        return Err(Error::invariant(
            file,
            row,
            format!("origin and destination are both `{}`", v.origin_port),
        ));
    }
    if v.arrival < v.sail {
        return Err(Error::invariant(
            file,
            row,
            "arrival_date precedes sail_date",
        ));
    }
    if !(v.dwt.is_finite() && v.dwt > 0.0) {
        return Err(Error::invariant(
            file,
            row,
            format!("dwt must be > 0, got {}", v.dwt),
        ));
    }
    if !(v.discharge_tonnes.is_finite() && v.discharge_tonnes >= 0.0) {
        return Err(Error::invariant(file, row, "discharge_tonnes must be >= 0"));
    }
    if v.discharge_tonnes > v.dwt {
        return Err(Error::invariant(
            file,
            row,
            format!(
                "discharge_tonnes {} exceeds dwt {}",
                v.discharge_tonnes, v.dwt
            ),
        ));
    }
    Ok(())
}

/// Parses `YYYY-MM-DD` or `YYYY-MM-DDTHH:MM:SS` (an optional trailing `Z`
/// is accepted).
pub fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    let s = s.trim();
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Some(d.and_time(NaiveTime::MIN));
    }
    let s = s.strip_suffix('Z').unwrap_or(s);
    NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S")
        .or_else(|_| NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S"))
        .ok()
}

pub fn format_timestamp(t: &NaiveDateTime) -> String {
    if t.time() == NaiveTime::MIN {
        t.format("%Y-%m-%d").to_string()
    } else {
        t.format("%Y-%m-%dT%H:%M:%S").to_string()
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" | "y" => Some(true),
        "false" | "0" | "no" | "n" => Some(false),
        _ => None,
    }
}

/// Column lookup for one CSV file, resolved from its header.
struct Columns {
    file: String,
    index: Vec<usize>,
}

impl Columns {
    fn resolve(file: &str, headers: &csv::StringRecord, wanted: &[&str]) -> Result<Self> {
        let mut index = Vec::with_capacity(wanted.len());
        for name in wanted {
            match headers.iter().position(|h| h.trim() == *name) {
                Some(i) => index.push(i),
                None => {
                    return Err(Error::MissingColumn {
                        file: file.to_string(),
                        column: name.to_string(),
                    })
                }
            }
        }
        Ok(Columns {
            file: file.to_string(),
            index,
        })
    }

    fn text<'r>(&self, rec: &'r csv::StringRecord, col: usize) -> &'r str {
        rec.get(self.index[col]).unwrap_or("").trim()
    }

    fn number(&self, rec: &csv::StringRecord, row: u64, col: usize, name: &str) -> Result<f64> {
        let raw = self.text(rec, col);
        raw.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| {
                Error::invariant(&self.file, row, format!("{name}: not a number `{raw}`"))
            })
    }

    fn flag(&self, rec: &csv::StringRecord, row: u64, col: usize, name: &str) -> Result<bool> {
        let raw = self.text(rec, col);
        parse_bool(raw).ok_or_else(|| {
            Error::invariant(&self.file, row, format!("{name}: not a boolean `{raw}`"))
        })
    }

    fn timestamp(
        &self,
        rec: &csv::StringRecord,
        row: u64,
        col: usize,
        name: &str,
    ) -> Result<NaiveDateTime> {
        let raw = self.text(rec, col);
        parse_timestamp(raw).ok_or_else(|| {
            Error::invariant(
                &self.file,
                row,
                format!("{name}: not an ISO-8601 date `{raw}`"),
            )
        })
    }
}

fn open_csv(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(file))
}

/// Reads the rows of one CSV file, handing each parsed row to `sink` with its
/// line number.
fn read_rows<T>(
    path: &Path,
    wanted: &[&str],
    parse: impl Fn(&Columns, &csv::StringRecord, u64) -> Result<T>,
    mut sink: impl FnMut(&str, u64, Result<T>) -> Result<()>,
) -> Result<()> {
    let file = path.display().to_string();
    let mut reader = open_csv(path)?;
    let headers = reader
        .headers()
        .map_err(|source| Error::Csv {
            file: file.clone(),
            source,
        })?
        .clone();
    let cols = Columns::resolve(&file, &headers, wanted)?;
    for rec in reader.records() {
        let rec = rec.map_err(|source| Error::Csv {
            file: file.clone(),
            source,
        })?;
        let row = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        sink(&file, row, parse(&cols, &rec, row))?;
    }
    Ok(())
}

fn parse_region(c: &Columns, rec: &csv::StringRecord, row: u64) -> Result<RegionRecord> {
    Ok(RegionRecord {
        region_id: c.text(rec, 0).to_string(),
        region_name: c.text(rec, 1).to_string(),
        gdp_per_capita_usd: c.number(rec, row, 2, "gdp_per_capita_usd")?,
        is_sids: c.flag(rec, row, 3, "is_sids")?,
        is_ldc: c.flag(rec, row, 4, "is_ldc")?,
    })
}

fn parse_port(c: &Columns, rec: &csv::StringRecord, row: u64) -> Result<PortRecord> {
    Ok(PortRecord {
        port_id: c.text(rec, 0).to_string(),
        name: c.text(rec, 1).to_string(),
        country: c.text(rec, 2).to_string(),
        region_id: c.text(rec, 3).to_string(),
        latitude: c.number(rec, row, 4, "lat")?,
        longitude: c.number(rec, row, 5, "lon")?,
        temperature: c.number(rec, row, 6, "temperature_c")?,
        salinity: c.number(rec, row, 7, "salinity_ppt")?,
        ecoregion_id: c.text(rec, 8).to_string(),
    })
}

fn parse_voyage(c: &Columns, rec: &csv::StringRecord, row: u64) -> Result<VoyageRecord> {
    let vessel_type = c
        .text(rec, 2)
        .parse::<VesselType>()
        .map_err(|reason| Error::invariant(&c.file, row, reason))?;
    Ok(VoyageRecord {
        voyage_id: c.text(rec, 0).to_string(),
        vessel_id: c.text(rec, 1).to_string(),
        vessel_type,
        dwt: c.number(rec, row, 3, "dwt")?,
        origin_port: c.text(rec, 4).to_string(),
        dest_port: c.text(rec, 5).to_string(),
        sail: c.timestamp(rec, row, 6, "sail_date")?,
        arrival: c.timestamp(rec, row, 7, "arrival_date")?,
        discharge_tonnes: c.number(rec, row, 8, "discharge_tonnes")?,
    })
}

/// Reads and validates the four input files.
pub fn load_dataset(files: InputFiles<'_>, opts: LoadOptions) -> Result<Dataset> {
    let params = match files.params {
        Some(path) => Params::load(path)?,
        None => Params::default(),
    };
    let mut b = Builder::new(opts);
    read_rows(files.regions, &REGION_COLUMNS, parse_region, |f, row, r| {
        b.add_region(f, row, r)
    })?;
    read_rows(files.ports, &PORT_COLUMNS, parse_port, |f, row, p| {
        b.add_port(f, row, p)
    })?;
    read_rows(files.voyages, &VOYAGE_COLUMNS, parse_voyage, |f, row, v| {
        b.add_voyage(f, row, v)
    })?;
    let dataset = b.finish(params)?;
    let report = dataset.report();
    log::info!(
        "loaded {} regions, {} ports, {} voyages ({} rows rejected)",
        report.regions_kept,
        report.ports_kept,
        report.voyages_kept,
        report.rejections.len()
    );
    Ok(dataset)
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn write_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        file: path.display().to_string(),
        source,
    }
}

pub fn write_ports_csv(path: &Path, ports: &[PortRecord]) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = write_err(path);
    w.write_record(PORT_COLUMNS).map_err(&err)?;
    for p in ports {
        w.write_record([
            p.port_id.clone(),
            p.name.clone(),
            p.country.clone(),
            p.region_id.clone(),
            p.latitude.to_string(),
            p.longitude.to_string(),
            p.temperature.to_string(),
            p.salinity.to_string(),
            p.ecoregion_id.clone(),
        ])
        .map_err(&err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_voyages_csv(path: &Path, voyages: &[VoyageRecord]) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = write_err(path);
    w.write_record(VOYAGE_COLUMNS).map_err(&err)?;
    for v in voyages {
        w.write_record([
            v.voyage_id.clone(),
            v.vessel_id.clone(),
            v.vessel_type.to_string(),
            v.dwt.to_string(),
            v.origin_port.clone(),
            v.dest_port.clone(),
            format_timestamp(&v.sail),
            format_timestamp(&v.arrival),
            v.discharge_tonnes.to_string(),
        ])
        .map_err(&err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_regions_csv(path: &Path, regions: &[RegionRecord]) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = write_err(path);
    w.write_record(REGION_COLUMNS).map_err(&err)?;
    for r in regions {
        w.write_record([
            r.region_id.clone(),
            r.region_name.clone(),
            r.gdp_per_capita_usd.to_string(),
            r.is_sids.to_string(),
            r.is_ldc.to_string(),
        ])
        .map_err(&err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        file: path.display().to_string(),
        source,
    })?;
    text.push('\n');
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Writes `ports.csv`, `voyages.csv`, `regions.csv` and `params.json` into
/// `dir`.
pub fn write_dataset(dir: &Path, dataset: &Dataset) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_ports_csv(&dir.join("ports.csv"), dataset.ports())?;
    write_voyages_csv(&dir.join("voyages.csv"), dataset.voyages())?;
    write_regions_csv(&dir.join("regions.csv"), dataset.regions())?;
    write_json(&dir.join("params.json"), dataset.params())
}

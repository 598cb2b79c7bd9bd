//! Directory-backed catalog of quadratic APN tables keyed by fingerprint.
//!
//! Layout: `index.tsv` (one row per stored table), `tables/<key>.lut` with
//! the bytes exactly as inserted, and `.lock` held exclusively by writers.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use quadapn::boolfun::Vbf;
use quadapn::equiv::Fingerprint;
use quadapn::Error;
use sha2::{Digest, Sha256};

const INDEX: &str = "index.tsv";
const HEADER: &str = "fingerprint\ttable\torigin\tclass\trng_seed\ttimestamp";

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Provenance {
    pub origin: String,
    pub class: Option<usize>,
    pub rng_seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub fingerprint: String,
    pub key: String,
    pub provenance: Provenance,
    pub timestamp: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Inserted {
    /// First table with this fingerprint.
    New,
    /// Joins an existing bucket; the bucket is now UNDECIDED.
    Collision,
    /// The same table is already stored.
    Duplicate,
}

pub struct Catalog {
    dir: PathBuf,
    entries: Vec<Entry>,
    _lock: Option<File>,
}

impl Catalog {
    /// Opens for reading; a missing directory reads as empty.
    pub fn open(dir: &Path) -> Result<Self, Error> {
        let entries = read_index(dir)?;
        Ok(Catalog { dir: dir.to_path_buf(), entries, _lock: None })
    }

    /// Creates the directory if needed and blocks on the writer lock.
    pub fn open_for_write(dir: &Path) -> Result<Self, Error> {
        fs::create_dir_all(dir.join("tables"))?;
        let lock = OpenOptions::new().create(true).truncate(false).write(true).open(dir.join(".lock"))?;
        lock.lock()?;
        let entries = read_index(dir)?;
        if !dir.join(INDEX).exists() {
            fs::write(dir.join(INDEX), format!("{HEADER}\n"))?;
        }
        Ok(Catalog { dir: dir.to_path_buf(), entries, _lock: Some(lock) })
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    /// Entries grouped by fingerprint.
    pub fn buckets(&self) -> BTreeMap<&str, Vec<&Entry>> {
        let mut out: BTreeMap<&str, Vec<&Entry>> = BTreeMap::new();
        for e in &self.entries {
            out.entry(e.fingerprint.as_str()).or_default().push(e);
        }
        out
    }

    pub fn table_path(&self, key: &str) -> PathBuf {
        self.dir.join("tables").join(format!("{key}.lut"))
    }

    /// Stores `bytes` (a lookup-table file) after checking it is quadratic APN.
    pub fn insert(&mut self, bytes: &str, provenance: Provenance) -> Result<Inserted, Error> {
        if self._lock.is_none() {
            return Err(Error::Precondition("catalog opened read-only".into()));
        }
        let table = Vbf::from_lut_text(bytes)?;
        let fingerprint = Fingerprint::of(&table)?.to_string();
        let key = table_key(&table);
        if self.entries.iter().any(|e| e.key == key) {
            return Ok(Inserted::Duplicate);
        }
        let outcome =
            if self.entries.iter().any(|e| e.fingerprint == fingerprint) { Inserted::Collision } else { Inserted::New };
        fs::write(self.table_path(&key), bytes)?;
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let entry = Entry { fingerprint, key, provenance, timestamp };
        let mut index = OpenOptions::new().append(true).open(self.dir.join(INDEX))?;
        writeln!(index, "{}", format_row(&entry))?;
        index.sync_data()?;
        self.entries.push(entry);
        Ok(outcome)
    }

    /// Copies every stored table file to `out`, unchanged.
    pub fn export(&self, out: &Path) -> Result<usize, Error> {
        fs::create_dir_all(out)?;
        for e in &self.entries {
            fs::copy(self.table_path(&e.key), out.join(format!("{}.lut", e.key)))?;
        }
        Ok(self.entries.len())
    }

    /// Reloads every table and checks degree, APN property, key and fingerprint.
    pub fn verify(&self) -> Result<usize, Error> {
        for e in &self.entries {
            let text = fs::read_to_string(self.table_path(&e.key))?;
            let table = Vbf::from_lut_text(&text)?;
            if !table.is_apn() || table.algebraic_degree() > 2 {
                return Err(Error::Precondition(format!("table {} is not quadratic APN", e.key)));
            }
            if table_key(&table) != e.key || Fingerprint::of(&table)?.to_string() != e.fingerprint {
                return Err(Error::Precondition(format!("table {} does not match its index row", e.key)));
            }
        }
        Ok(self.entries.len())
    }
}

/// First 16 hex digits of the SHA-256 of the canonical table text.
pub fn table_key(table: &Vbf) -> String {
    let digest = Sha256::digest(table.to_lut_text().as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

fn format_row(e: &Entry) -> String {
    let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
    format!(
        "{}\t{}\t{}\t{}\t{}\t{}",
        e.fingerprint,
        e.key,
        if e.provenance.origin.is_empty() { "-" } else { &e.provenance.origin },
        opt(e.provenance.class.map(|c| c.to_string())),
        opt(e.provenance.rng_seed.map(|s| s.to_string())),
        e.timestamp
    )
}

fn read_index(dir: &Path) -> Result<Vec<Entry>, Error> {
    let path = dir.join(INDEX);
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 && line == HEADER || line.trim().is_empty() {
            continue;
        }
        let bad = || Error::Parse(format!("catalog index line {}: {line:?}", i + 1));
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 6 {
            return Err(bad());
        }
        let opt = |s: &str| (s != "-").then(|| s.to_string());
        out.push(Entry {
            fingerprint: cols[0].to_string(),
            key: cols[1].to_string(),
            provenance: Provenance {
                origin: opt(cols[2]).unwrap_or_default(),
                class: opt(cols[3]).map(|s| s.parse()).transpose().map_err(|_| bad())?,
                rng_seed: opt(cols[4]).map(|s| s.parse()).transpose().map_err(|_| bad())?,
            },
            timestamp: cols[5].parse().map_err(|_| bad())?,
        });
    }
    Ok(out)
}

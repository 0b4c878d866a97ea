//! One market per directory: `config.json` holds the parameters and
//! `journal.jsonl` the append-only event log.

use std::fs::{self, File, OpenOptions};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use reward_rating::{read_journal, JournalEvent, Market, MarketError, MarketParams};

pub const CONFIG_FILE: &str = "config.json";
pub const JOURNAL_FILE: &str = "journal.jsonl";
const LOCK_FILE: &str = ".lock";

pub struct MarketDir {
    root: PathBuf,
}

/// Held for the duration of a mutating command.
pub struct DirLock {
    _file: File,
}

impl MarketDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        MarketDir { root: root.into() }
    }

    pub fn config_path(&self) -> PathBuf {
        self.root.join(CONFIG_FILE)
    }

    pub fn journal_path(&self) -> PathBuf {
        self.root.join(JOURNAL_FILE)
    }

    pub fn is_initialized(&self) -> bool {
        self.config_path().exists()
    }

    pub fn lock(&self) -> anyhow::Result<DirLock> {
        fs::create_dir_all(&self.root)
            .with_context(|| format!("creating {}", self.root.display()))?;
        let file = OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(self.root.join(LOCK_FILE))
            .context("opening lock file")?;
        file.lock().context("locking market directory")?;
        Ok(DirLock { _file: file })
    }

    pub fn init(&self, params: &MarketParams, force: bool) -> anyhow::Result<()> {
        params.validate()?;
        if self.is_initialized() && !force {
            bail!(
                "{} is already initialized (use --force to start over)",
                self.root.display()
            );
        }
        write_atomic(
            &self.config_path(),
            serde_json::to_string_pretty(params)?.as_bytes(),
        )?;
        write_atomic(&self.journal_path(), b"")?;
        Ok(())
    }

    pub fn params(&self) -> anyhow::Result<MarketParams> {
        if !self.is_initialized() {
            bail!(
                "{} is not a market directory (run `init` first)",
                self.root.display()
            );
        }
        load_params(&self.config_path())
    }

    pub fn events(&self) -> Result<Vec<JournalEvent>, MarketError> {
        read_events(&self.journal_path())
    }

    /// Loads parameters and replays the journal.
    pub fn open(&self) -> anyhow::Result<Market> {
        let params = self.params()?;
        Ok(rebuild_state(&self.journal_path(), params)?)
    }

    /// Appends events by rewriting the journal to a temporary file and
    /// renaming it over the original.
    pub fn append(&self, events: &[JournalEvent]) -> anyhow::Result<()> {
        let path = self.journal_path();
        let mut contents = match fs::read(&path) {
            Ok(bytes) => bytes,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(e).context("reading journal"),
        };
        if !contents.is_empty() && !contents.ends_with(b"\n") {
            contents.push(b'\n');
        }
        for event in events {
            contents.extend_from_slice(event.to_json_line().as_bytes());
            contents.push(b'\n');
        }
        write_atomic(&path, &contents)
    }

    pub fn save_market(&self, market: &Market, force: bool) -> anyhow::Result<()> {
        self.init(market.params(), force)?;
        self.append(market.journal())
    }
}

pub fn load_params(path: &Path) -> anyhow::Result<MarketParams> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let params: MarketParams =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    params.validate()?;
    Ok(params)
}

fn read_events(path: &Path) -> Result<Vec<JournalEvent>, MarketError> {
    let file = File::open(path).map_err(|e| MarketError::CorruptJournal {
        line: 0,
        reason: format!("{}: {e}", path.display()),
    })?;
    read_journal(BufReader::new(file))
}

/// Replays the journal at `path`; any parse or replay failure is a
/// `CorruptJournal` with the offending line.
pub fn rebuild_state(path: &Path, params: MarketParams) -> Result<Market, MarketError> {
    let events = read_events(path)?;
    Market::replay(params, &events)
}

pub fn write_atomic(path: &Path, contents: &[u8]) -> anyhow::Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    {
        let mut file = File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        file.write_all(contents)?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path).with_context(|| format!("replacing {}", path.display()))?;
    Ok(())
}

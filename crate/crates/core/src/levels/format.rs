//! Text level files.
//!
//! ```text
//! blastlab-level 1
//! id tier3-07
//! size 6 6                  # width height
//! colors 4
//! move-limit 20
//! refill 0.25 0.25 0.25 0.25
//! goal collect-color 0 18
//! goal clear-rock 3
//! tag tier 3
//! legend
//! A rock 2
//! B grass
//! C container 0 10          # id hp
//! D teleporter 0 entry      # pair role
//! end
//! layout
//! ..A...
//! ......
//! end
//! ```
//!
//! Layout characters: `.` empty (filled with a random color at game start when
//! reachable from the top), `0`-`5` a fixed color, anything else must be
//! declared in the legend. `#` starts a comment outside the layout block.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::engine::{GoalKind, Level, Piece, PortalRole};

pub const FORMAT_MAGIC: &str = "blastlab-level";
pub const FORMAT_VERSION: u32 = 1;
pub const FILE_EXTENSION: &str = "lvl";

const LEGEND_POOL: &str = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";

#[derive(Debug, thiserror::Error)]
pub enum LevelFileError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Validation(#[from] crate::engine::ValidationError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("level {0} needs more than {1} distinct legend characters")]
    LegendOverflow(String, usize),
}

fn parse_err(line: usize, reason: impl Into<String>) -> LevelFileError {
    LevelFileError::Parse {
        line,
        reason: reason.into(),
    }
}

pub fn serialize_level(level: &Level) -> Result<String, LevelFileError> {
    let mut legend: Vec<(char, Piece)> = Vec::new();
    let mut pool = LEGEND_POOL.chars();
    for piece in &level.layout {
        let builtin = matches!(piece, Piece::Empty | Piece::Color(_));
        if builtin || legend.iter().any(|(_, p)| p == piece) {
            continue;
        }
        let ch = pool
            .next()
            .ok_or_else(|| LevelFileError::LegendOverflow(level.id.clone(), LEGEND_POOL.len()))?;
        legend.push((ch, *piece));
    }

    let mut s = String::new();
    writeln!(s, "{FORMAT_MAGIC} {FORMAT_VERSION}").unwrap();
    writeln!(s, "id {}", level.id).unwrap();
    writeln!(s, "size {} {}", level.width, level.height).unwrap();
    writeln!(s, "colors {}", level.color_count).unwrap();
    writeln!(s, "move-limit {}", level.move_limit).unwrap();
    let weights: Vec<String> = level
        .refill_weights
        .iter()
        .map(|w| format!("{w:?}"))
        .collect();
    writeln!(s, "refill {}", weights.join(" ")).unwrap();
    for (kind, need) in &level.goals {
        writeln!(s, "goal {kind} {need}").unwrap();
    }
    for (key, value) in &level.tags {
        writeln!(s, "tag {key} {value}").unwrap();
    }
    writeln!(s, "legend").unwrap();
    for (ch, piece) in &legend {
        let desc = match *piece {
            Piece::Rock { hp } => format!("rock {hp}"),
            Piece::Grass => "grass".to_string(),
            Piece::Container { id } => {
                format!(
                    "container {id} {}",
                    level.container_hp.get(&id).copied().unwrap_or(0)
                )
            }
            Piece::Teleporter { pair, role } => format!(
                "teleporter {pair} {}",
                match role {
                    PortalRole::Entry => "entry",
                    PortalRole::Exit => "exit",
                }
            ),
            Piece::Empty | Piece::Color(_) => unreachable!(),
        };
        writeln!(s, "{ch} {desc}").unwrap();
    }
    writeln!(s, "end").unwrap();
    writeln!(s, "layout").unwrap();
    for row in level.layout.chunks(level.width) {
        let line: String = row
            .iter()
            .map(|p| match p {
                Piece::Empty => '.',
                Piece::Color(c) => char::from(b'0' + c),
                other => legend.iter().find(|(_, p)| p == other).unwrap().0,
            })
            .collect();
        writeln!(s, "{line}").unwrap();
    }
    writeln!(s, "end").unwrap();
    Ok(s)
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn num<T: std::str::FromStr>(
    line: usize,
    tok: Option<&str>,
    what: &str,
) -> Result<T, LevelFileError> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("bad {what} '{tok}'")))
}

fn parse_goal(line: usize, toks: &[&str]) -> Result<(GoalKind, u32), LevelFileError> {
    let (kind, rest) = match toks.first().copied() {
        Some("collect-color") => {
            let c: u8 = num(line, toks.get(1).copied(), "goal color")?;
            (GoalKind::CollectColor(c), &toks[2..])
        }
        Some("clear-rock") => (GoalKind::ClearRock, &toks[1..]),
        Some("clear-grass") => (GoalKind::ClearGrass, &toks[1..]),
        Some("clear-container") => (GoalKind::ClearContainer, &toks[1..]),
        Some(other) => return Err(parse_err(line, format!("unknown goal kind '{other}'"))),
        None => return Err(parse_err(line, "empty goal")),
    };
    if rest.len() != 1 {
        return Err(parse_err(line, "goal needs exactly one count"));
    }
    Ok((kind, num(line, rest.first().copied(), "goal count")?))
}

fn parse_legend_entry(
    line: usize,
    toks: &[&str],
    container_hp: &mut BTreeMap<u8, u8>,
) -> Result<(char, Piece), LevelFileError> {
    let mut chars = toks[0].chars();
    let ch = chars.next().unwrap();
    if chars.next().is_some() || ch == '.' || ch.is_ascii_digit() || ch == '#' {
        return Err(parse_err(
            line,
            format!("invalid legend character '{}'", toks[0]),
        ));
    }
    let piece = match toks.get(1).copied() {
        Some("rock") => Piece::Rock {
            hp: num(line, toks.get(2).copied(), "rock hp")?,
        },
        Some("grass") => Piece::Grass,
        Some("container") => {
            let id: u8 = num(line, toks.get(2).copied(), "container id")?;
            let hp: u8 = num(line, toks.get(3).copied(), "container hp")?;
            container_hp.insert(id, hp);
            Piece::Container { id }
        }
        Some("teleporter") => {
            let pair: u8 = num(line, toks.get(2).copied(), "teleporter pair")?;
            let role = match toks.get(3).copied() {
                Some("entry") => PortalRole::Entry,
                Some("exit") => PortalRole::Exit,
                _ => return Err(parse_err(line, "teleporter role must be entry or exit")),
            };
            Piece::Teleporter { pair, role }
        }
        Some(other) => return Err(parse_err(line, format!("unknown piece kind '{other}'"))),
        None => return Err(parse_err(line, "legend entry without a piece kind")),
    };
    Ok((ch, piece))
}

/// Parses and validates a level file.
pub fn parse_level(text: &str) -> Result<Level, LevelFileError> {
    #[derive(PartialEq)]
    enum Section {
        Header,
        Legend,
        Layout,
        Done,
    }

    let mut section = Section::Header;
    let mut saw_magic = false;
    let mut id = None;
    let mut size: Option<(usize, usize)> = None;
    let mut colors = None;
    let mut move_limit = None;
    let mut refill = None;
    let mut goals = BTreeMap::new();
    let mut tags = BTreeMap::new();
    let mut legend: BTreeMap<char, Piece> = BTreeMap::new();
    let mut container_hp = BTreeMap::new();
    let mut layout = Vec::new();
    let mut rows = 0usize;
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        if section == Section::Layout {
            let row = raw.trim();
            if row == "end" {
                section = Section::Done;
                continue;
            }
            let (width, _) = size.ok_or_else(|| parse_err(line, "layout before size"))?;
            if row.chars().count() != width {
                return Err(parse_err(
                    line,
                    format!(
                        "layout row has {} cells, expected {width}",
                        row.chars().count()
                    ),
                ));
            }
            for ch in row.chars() {
                let piece = match ch {
                    '.' => Piece::Empty,
                    '0'..='9' => Piece::Color(ch as u8 - b'0'),
                    other => *legend.get(&other).ok_or_else(|| {
                        parse_err(line, format!("unknown piece character '{other}'"))
                    })?,
                };
                layout.push(piece);
            }
            rows += 1;
            continue;
        }

        let body = strip_comment(raw);
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        match section {
            Section::Legend => {
                if toks == ["end"] {
                    section = Section::Header;
                } else {
                    let (ch, piece) = parse_legend_entry(line, &toks, &mut container_hp)?;
                    if legend.insert(ch, piece).is_some() {
                        return Err(parse_err(
                            line,
                            format!("legend character '{ch}' declared twice"),
                        ));
                    }
                }
                continue;
            }
            Section::Done => return Err(parse_err(line, "content after layout block")),
            _ => {}
        }
        if !saw_magic {
            if toks.first() != Some(&FORMAT_MAGIC) {
                return Err(parse_err(line, "missing blastlab-level header"));
            }
            let version: u32 = num(line, toks.get(1).copied(), "format version")?;
            if version != FORMAT_VERSION {
                return Err(parse_err(
                    line,
                    format!("unsupported format version {version}"),
                ));
            }
            saw_magic = true;
            continue;
        }
        match toks[0] {
            "id" => {
                if toks.len() != 2 {
                    return Err(parse_err(line, "id must be a single token"));
                }
                id = Some(toks[1].to_string());
            }
            "size" => {
                size = Some((
                    num(line, toks.get(1).copied(), "width")?,
                    num(line, toks.get(2).copied(), "height")?,
                ))
            }
            "colors" => colors = Some(num::<u8>(line, toks.get(1).copied(), "color count")?),
            "move-limit" => {
                move_limit = Some(num::<u32>(line, toks.get(1).copied(), "move limit")?)
            }
            "refill" => {
                let weights = toks[1..]
                    .iter()
                    .map(|t| num::<f64>(line, Some(t), "refill weight"))
                    .collect::<Result<Vec<_>, _>>()?;
                refill = Some(weights);
            }
            "goal" => {
                let (kind, need) = parse_goal(line, &toks[1..])?;
                if goals.insert(kind, need).is_some() {
                    return Err(parse_err(line, format!("goal {kind} given twice")));
                }
            }
            "tag" => {
                if toks.len() != 3 {
                    return Err(parse_err(line, "tag needs a key and a value"));
                }
                tags.insert(toks[1].to_string(), toks[2].to_string());
            }
            "legend" => section = Section::Legend,
            "layout" => section = Section::Layout,
            other => return Err(parse_err(line, format!("unknown key '{other}'"))),
        }
    }

    if section != Section::Done {
        return Err(parse_err(last_line, "missing or unterminated layout block"));
    }
    let (width, height) = size.ok_or_else(|| parse_err(last_line, "missing size"))?;
    if rows != height {
        return Err(parse_err(
            last_line,
            format!("layout has {rows} rows, expected {height}"),
        ));
    }
    let color_count = colors.ok_or_else(|| parse_err(last_line, "missing colors"))?;
    let level = Level {
        id: id.ok_or_else(|| parse_err(last_line, "missing id"))?,
        width,
        height,
        layout,
        container_hp,
        move_limit: move_limit.ok_or_else(|| parse_err(last_line, "missing move-limit"))?,
        goals,
        color_count,
        refill_weights: refill
            .unwrap_or_else(|| vec![1.0 / f64::from(color_count.max(1)); color_count as usize]),
        tags,
    };
    level.validate()?;
    Ok(level)
}

pub fn load_level(path: &Path) -> Result<Level, LevelFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| LevelFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_level(&text)
}

pub fn save_level(level: &Level, path: &Path) -> Result<(), LevelFileError> {
    level.validate()?;
    let text = serialize_level(level)?;
    let io = |source| LevelFileError::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(io)?;
    }
    std::fs::write(path, text).map_err(io)
}

/// Loads every `*.lvl` file in `dir`, sorted by file name.
pub fn load_level_set(dir: &Path) -> Result<Vec<Level>, LevelFileError> {
    let io = |source| LevelFileError::Io {
        path: dir.display().to_string(),
        source,
    };
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == FILE_EXTENSION))
        .collect();
    paths.sort();
    paths.iter().map(|p| load_level(p)).collect()
}

/// Writes `levels` as `<dir>/<levelId>.lvl`.
pub fn save_level_set(
    levels: &[Level],
    dir: &Path,
) -> Result<Vec<std::path::PathBuf>, LevelFileError> {
    levels
        .iter()
        .map(|level| {
            let path = dir.join(format!("{}.{FILE_EXTENSION}", level.id));
            save_level(level, &path).map(|_| path)
        })
        .collect()
}

//! Color schemes: per-color constraints on vertex weight, subtree weight and
//! child color.

use std::fmt;

use sha2::{Digest, Sha256};

use crate::{Error, Result};

/// Index of a color inside its [`ColorScheme`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColorId(pub u16);

impl ColorId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorSpec {
    pub name: String,
    /// Smallest weight a vertex of this color may carry.
    pub min_weight: u32,
    /// Largest weight a vertex of this color may carry; `None` is unbounded.
    pub max_weight: Option<u32>,
    /// Smallest total weight of a subtree rooted at a vertex of this color.
    pub min_tree_weight: u32,
    /// The only color allowed for children of this color.
    pub child: ColorId,
}

impl ColorSpec {
    /// Largest admissible root weight for a tree of total weight `total`.
    #[inline]
    pub fn max_weight_within(&self, total: u32) -> u32 {
        match self.max_weight {
            Some(max) => max.min(total),
            None => total,
        }
    }
}

/// A validated set of color constraints plus the colors allowed at the
/// centroid of a free tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorScheme {
    colors: Vec<ColorSpec>,
    root_colors: Vec<ColorId>,
}

/// Layout of the `block` preset.
pub const BLOCK: ColorId = ColorId(0);
pub const CUT: ColorId = ColorId(1);

impl ColorScheme {
    /// Validates and builds a scheme. `root_colors` defaults to every color.
    pub fn new(colors: Vec<ColorSpec>, root_colors: Option<Vec<ColorId>>) -> Result<Self> {
        if colors.is_empty() {
            return Err(Error::Scheme("a scheme needs at least one color".into()));
        }
        if colors.len() > u16::MAX as usize {
            return Err(Error::Scheme("too many colors".into()));
        }
        for (i, c) in colors.iter().enumerate() {
            if c.name.is_empty() || c.name.contains(|ch: char| ch.is_whitespace() || ch == ':') {
                return Err(Error::Scheme(format!("color #{i} has an invalid name {:?}", c.name)));
            }
            if colors[..i].iter().any(|o| o.name == c.name) {
                return Err(Error::Scheme(format!("duplicate color name {}", c.name)));
            }
        }
        for c in &colors {
            let name = &c.name;
            if c.child.index() >= colors.len() {
                return Err(Error::Scheme(format!("{name}: child color does not exist")));
            }
            if let Some(max) = c.max_weight {
                if c.min_weight > max {
                    return Err(Error::Scheme(format!("{name}: minw > maxw")));
                }
            }
            if c.min_tree_weight < c.min_weight {
                return Err(Error::Scheme(format!("{name}: mintw < minw")));
            }
            if c.min_tree_weight < 1 {
                return Err(Error::Scheme(format!("{name}: mintw must be at least 1")));
            }
            if c.min_weight == 0 && colors[c.child.index()].min_weight == 0 {
                return Err(Error::Scheme(format!(
                    "{name}: minw is 0 but child color {} also allows weight 0, \
                     so zero-weight vertices would not form an independent set",
                    colors[c.child.index()].name
                )));
            }
        }
        let root_colors = match root_colors {
            Some(roots) => {
                if roots.is_empty() {
                    return Err(Error::Scheme("the root color set is empty".into()));
                }
                let mut sorted = roots;
                sorted.sort();
                sorted.dedup();
                if sorted.iter().any(|r| r.index() >= colors.len()) {
                    return Err(Error::Scheme("root color does not exist".into()));
                }
                sorted
            }
            None => (0..colors.len() as u16).map(ColorId).collect(),
        };
        Ok(Self { colors, root_colors })
    }

    /// Unweighted trees: every vertex has weight exactly one.
    pub fn gray() -> Self {
        Self::new(vec![spec("Gray", 1, Some(1), 1, 0)], None).expect("valid preset")
    }

    /// Trees with arbitrary positive vertex weights.
    pub fn positive_weighted() -> Self {
        Self::new(vec![spec("Positive", 1, None, 1, 0)], None).expect("valid preset")
    }

    /// Weighted block trees. Red vertices are blocks, yellow vertices are cut
    /// vertices; see [`BLOCK`] and [`CUT`].
    pub fn block() -> Self {
        Self::new(
            vec![spec("Red", 0, None, 1, 1), spec("Yellow", 1, Some(1), 2, 0)],
            None,
        )
        .expect("valid preset")
    }

    /// Looks up a built-in scheme by its command-line name.
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "gray" => Some(Self::gray()),
            "pos-weighted" => Some(Self::positive_weighted()),
            "block" => Some(Self::block()),
            _ => None,
        }
    }

    pub fn colors(&self) -> &[ColorSpec] {
        &self.colors
    }

    pub fn color_ids(&self) -> impl Iterator<Item = ColorId> + '_ {
        (0..self.colors.len() as u16).map(ColorId)
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    #[inline]
    pub fn color(&self, id: ColorId) -> &ColorSpec {
        &self.colors[id.index()]
    }

    #[inline]
    pub fn child(&self, id: ColorId) -> ColorId {
        self.colors[id.index()].child
    }

    pub fn name(&self, id: ColorId) -> &str {
        &self.colors[id.index()].name
    }

    pub fn color_by_name(&self, name: &str) -> Option<ColorId> {
        self.colors
            .iter()
            .position(|c| c.name == name)
            .map(|i| ColorId(i as u16))
    }

    pub fn root_colors(&self) -> &[ColorId] {
        &self.root_colors
    }

    pub fn is_root_color(&self, id: ColorId) -> bool {
        self.root_colors.binary_search(&id).is_ok()
    }

    /// Parses the declarative scheme format.
    ///
    /// ```text
    /// # name  minw  maxw  mintw  chld
    /// Red     0     inf   1      Yellow
    /// Yellow  1     1     2      Red
    /// root Red Yellow
    /// ```
    ///
    /// Blank lines and `#` comments are ignored. The `root` line is optional.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows: Vec<(String, u32, Option<u32>, u32, String)> = Vec::new();
        let mut roots: Option<Vec<String>> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let err = |msg: &str| Error::Parse(format!("scheme line {}: {msg}", lineno + 1));
            if fields[0] == "root" {
                if roots.is_some() {
                    return Err(err("more than one root line"));
                }
                roots = Some(fields[1..].iter().map(|s| s.to_string()).collect());
                continue;
            }
            if fields.len() != 5 {
                return Err(err("expected `name minw maxw mintw chld`"));
            }
            let num = |s: &str| s.parse::<u32>().map_err(|_| err(&format!("bad number {s:?}")));
            let max = match fields[2] {
                "inf" | "unbounded" => None,
                s => Some(num(s)?),
            };
            rows.push((
                fields[0].to_string(),
                num(fields[1])?,
                max,
                num(fields[3])?,
                fields[4].to_string(),
            ));
        }
        let lookup = |name: &str| {
            rows.iter()
                .position(|r| r.0 == name)
                .map(|i| ColorId(i as u16))
                .ok_or_else(|| Error::Scheme(format!("unknown color {name}")))
        };
        let colors = rows
            .iter()
            .map(|(name, minw, maxw, mintw, child)| {
                Ok(ColorSpec {
                    name: name.clone(),
                    min_weight: *minw,
                    max_weight: *maxw,
                    min_tree_weight: *mintw,
                    child: lookup(child)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let roots = roots
            .map(|names| names.iter().map(|n| lookup(n)).collect::<Result<Vec<_>>>())
            .transpose()?;
        Self::new(colors, roots)
    }

    /// Renders the scheme in the format accepted by [`ColorScheme::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.colors {
            let max = c.max_weight.map_or_else(|| "inf".to_string(), |m| m.to_string());
            out.push_str(&format!(
                "{} {} {} {} {}\n",
                c.name,
                c.min_weight,
                max,
                c.min_tree_weight,
                self.name(c.child)
            ));
        }
        out.push_str("root");
        for r in &self.root_colors {
            out.push(' ');
            out.push_str(self.name(*r));
        }
        out.push('\n');
        out
    }

    /// Content hash of the scheme, used to key cached count tables.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Display for ColorScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn spec(name: &str, min: u32, max: Option<u32>, mintw: u32, child: u16) -> ColorSpec {
    ColorSpec {
        name: name.to_string(),
        min_weight: min,
        max_weight: max,
        min_tree_weight: mintw,
        child: ColorId(child),
    }
}

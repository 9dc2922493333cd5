//! Synthetic comment datasets with planted spam campaigns.
//!
//! Two campaign strategies are generated on top of background chatter:
//!
//! * Campaign 1: a few accounts, each posting near-duplicate comments on
//!   many videos in every active window.
//! * Campaign 2: many accounts, each posting similar comments on a few
//!   videos of its own; no two accounts share a video.
//!
//! Every random choice is drawn from a generator seeded by hashing the
//! scenario seed with the entity it belongs to, so output does not depend
//! on generation order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use chrono::{DateTime, Duration, Utc};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{parse_timestamp, write_comments, CommentRecord, WindowSpec};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("infeasible scenario: {0}")]
    Infeasible(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackgroundConfig {
    pub n_users: usize,
    pub n_videos: usize,
    pub comments_per_window: usize,
    /// probability that a background comment carries the spam hint
    pub hint_rate: f64,
    /// Zipf exponent of video popularity
    pub popularity_exponent: f64,
    /// relative frequency of posting on 1, 2, ... videos per visit
    pub videos_per_visit: Vec<f64>,
}

impl Default for BackgroundConfig {
    fn default() -> Self {
        Self {
            n_users: 9000,
            n_videos: 300,
            comments_per_window: 2300,
            hint_rate: 0.02,
            popularity_exponent: 0.5,
            videos_per_visit: vec![0.55, 0.25, 0.12, 0.05, 0.03],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Campaign1Config {
    pub n_accounts: usize,
    /// videos each account comments on per active window
    pub n_videos_targeted: usize,
    pub active_windows: BTreeSet<usize>,
    pub variation_rate: f64,
    pub hint_fraction: f64,
}

impl Default for Campaign1Config {
    fn default() -> Self {
        Self {
            n_accounts: 4,
            n_videos_targeted: 40,
            active_windows: BTreeSet::from([2, 3, 8, 9]),
            variation_rate: 0.1,
            hint_fraction: 0.7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Campaign2Config {
    pub n_accounts: usize,
    pub videos_per_account: usize,
    pub active_windows: BTreeSet<usize>,
    pub n_templates: usize,
    pub variation_rate: f64,
    pub hint_fraction: f64,
}

impl Default for Campaign2Config {
    fn default() -> Self {
        Self {
            n_accounts: 20,
            videos_per_account: 2,
            active_windows: BTreeSet::from([4, 5, 9, 10]),
            n_templates: 3,
            variation_rate: 0.1,
            hint_fraction: 0.7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub n_windows: usize,
    pub window_hours: i64,
    /// RFC 3339 start of window 0
    pub start: String,
    pub background: BackgroundConfig,
    pub campaign1: Campaign1Config,
    pub campaign2: Campaign2Config,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            seed: 2011,
            n_windows: 12,
            window_hours: 6,
            start: "2011-11-14T16:19:32Z".into(),
            background: BackgroundConfig::default(),
            campaign1: Campaign1Config::default(),
            campaign2: Campaign2Config::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, SynthError> {
        toml::from_str(text).map_err(|e| SynthError::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self, SynthError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn start_time(&self) -> Result<DateTime<Utc>, SynthError> {
        parse_timestamp(&self.start).map_err(|e| SynthError::Config(format!("start `{}`: {e}", self.start)))
    }

    pub fn window_spec(&self) -> Result<WindowSpec, SynthError> {
        WindowSpec::new(self.start_time()?, Duration::hours(self.window_hours), self.n_windows)
            .map_err(|e| SynthError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::Infeasible(m));
        let (bg, c1, c2) = (&self.background, &self.campaign1, &self.campaign2);
        if self.n_windows == 0 || self.window_hours <= 0 {
            return bad("need at least one window of positive length".into());
        }
        if bg.n_videos == 0 || bg.n_users == 0 {
            return bad("background needs users and videos".into());
        }
        if bg.videos_per_visit.is_empty() || bg.videos_per_visit.iter().any(|&w| w < 0.0) || bg.videos_per_visit.iter().sum::<f64>() <= 0.0 {
            return bad("videos_per_visit must hold non-negative weights with a positive sum".into());
        }
        if bg.videos_per_visit.len() > bg.n_videos {
            return bad("videos_per_visit allows more videos than exist".into());
        }
        if c1.n_accounts >= c2.n_accounts {
            return bad(format!("campaign1 accounts ({}) must be fewer than campaign2 accounts ({})", c1.n_accounts, c2.n_accounts));
        }
        if c1.n_videos_targeted < 5 * c2.videos_per_account {
            return bad("campaign1 accounts must target at least 5x the videos of campaign2 accounts".into());
        }
        if c1.n_videos_targeted > bg.n_videos {
            return bad(format!("campaign1 targets {} videos but only {} exist", c1.n_videos_targeted, bg.n_videos));
        }
        if c2.n_accounts * c2.videos_per_account > bg.n_videos {
            return bad("not enough videos to keep campaign2 accounts video-disjoint".into());
        }
        if c2.n_templates == 0 || c2.n_templates > CAMPAIGN2_TEMPLATES.len() {
            return bad(format!("campaign2 n_templates must be in 1..={}", CAMPAIGN2_TEMPLATES.len()));
        }
        for (name, w) in [("campaign1", &c1.active_windows), ("campaign2", &c2.active_windows)] {
            if let Some(&bad_w) = w.iter().find(|&&w| w >= self.n_windows) {
                return bad(format!("{name} active window {bad_w} outside 0..{}", self.n_windows));
            }
        }
        for (name, p) in [
            ("background.hint_rate", bg.hint_rate),
            ("campaign1.variation_rate", c1.variation_rate),
            ("campaign1.hint_fraction", c1.hint_fraction),
            ("campaign2.variation_rate", c2.variation_rate),
            ("campaign2.hint_fraction", c2.hint_fraction),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} = {p} is not a probability"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Group {
    #[serde(rename = "BG")]
    Background,
    #[serde(rename = "C1")]
    Campaign1,
    #[serde(rename = "C2")]
    Campaign2,
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::Background => "BG",
            Group::Campaign1 => "C1",
            Group::Campaign2 => "C2",
        })
    }
}

impl std::str::FromStr for Group {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "BG" => Ok(Group::Background),
            "C1" => Ok(Group::Campaign1),
            "C2" => Ok(Group::Campaign2),
            other => Err(format!("unknown group `{other}`")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub records: Vec<CommentRecord>,
    pub ground_truth: BTreeMap<String, Group>,
}

impl Scenario {
    pub fn to_jsonl(&self) -> Vec<u8> {
        let mut out = Vec::new();
        write_comments(&self.records, &mut out).expect("writing to memory");
        out
    }

    pub fn ground_truth_csv(&self) -> String {
        let mut s = String::from("user_id,group\n");
        for (u, g) in &self.ground_truth {
            s.push_str(&format!("{u},{g}\n"));
        }
        s
    }

    pub fn accounts(&self, group: Group) -> Vec<&str> {
        self.ground_truth.iter().filter(|(_, &g)| g == group).map(|(u, _)| u.as_str()).collect()
    }

    pub fn write_to(&self, dir: &Path) -> Result<(), SynthError> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("comments.jsonl"), self.to_jsonl())?;
        std::fs::write(dir.join("ground_truth.csv"), self.ground_truth_csv())?;
        Ok(())
    }
}

pub fn parse_ground_truth(csv_text: &str) -> Result<BTreeMap<String, Group>, String> {
    let mut out = BTreeMap::new();
    for (i, line) in csv_text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let (u, g) = line.split_once(',').ok_or_else(|| format!("line {}: expected `user_id,group`", i + 1))?;
        out.insert(u.to_string(), g.parse()?);
    }
    Ok(out)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for one entity: FNV-1a of the entity name mixed with the seed.
pub fn entity_rng(seed: u64, entity: &str) -> ChaCha8Rng {
    let fnv = entity.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3));
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(fnv)))
}

const BACKGROUND_WORDS: &[&str] = &[
    "love", "song", "music", "great", "video", "amazing", "awesome", "funny", "beautiful", "voice", "lyrics", "guitar",
    "drums", "dance", "moves", "best", "ever", "watching", "again", "repeat", "chorus", "verse", "beat", "bass",
    "album", "tour", "concert", "ticket", "tonight", "tomorrow", "yesterday", "weekend", "summer", "winter", "rain",
    "sunshine", "happy", "sad", "cried", "laughed", "smile", "memories", "childhood", "school", "friends", "family",
    "brother", "sister", "mother", "father", "grandma", "puppy", "kitten", "cat", "dog", "hamster", "pizza", "coffee",
    "breakfast", "dinner", "kitchen", "recipe", "cooking", "baking", "cake", "cookies", "chocolate", "vanilla",
    "strawberry", "banana", "apple", "orange", "lemon", "garden", "flowers", "trees", "mountain", "river", "ocean",
    "beach", "island", "city", "village", "street", "car", "bike", "train", "plane", "airport", "travel", "journey",
    "adventure", "story", "movie", "trailer", "episode", "season", "finale", "character", "actor", "actress",
    "director", "camera", "editing", "effects", "graphics", "animation", "cartoon", "anime", "manga", "comic",
    "hero", "villain", "magic", "dragon", "castle", "knight", "princess", "wizard", "potion", "sword", "shield",
    "game", "gamer", "level", "boss", "score", "record", "champion", "team", "coach", "goal", "match", "league",
    "football", "soccer", "basketball", "baseball", "tennis", "golf", "hockey", "swimming", "running", "marathon",
    "workout", "muscles", "yoga", "healthy", "tired", "sleepy", "awake", "midnight", "morning", "evening",
    "afternoon", "minute", "hour", "forever", "always", "never", "sometimes", "often", "really", "totally",
    "absolutely", "definitely", "probably", "maybe", "honestly", "seriously", "literally", "basically", "actually",
    "whatever", "anyway", "thanks", "please", "sorry", "hello", "goodbye", "welcome", "congrats", "birthday",
    "wedding", "party", "holiday", "christmas", "halloween", "pumpkin", "costume", "scary", "spooky", "creepy",
    "weird", "strange", "crazy", "insane", "epic", "legendary", "classic", "vintage", "modern", "future", "science",
    "physics", "chemistry", "biology", "history", "geography", "math", "homework", "teacher", "student", "exam",
    "grade", "college", "university", "library", "book", "novel", "poem", "writer", "painter", "artist", "sketch",
    "drawing", "painting", "colors", "purple", "yellow", "green", "blue", "red", "black", "white", "silver", "gold",
    "diamond", "crystal", "rocket", "planet", "galaxy", "universe", "stars", "moon", "telescope", "robot", "computer",
    "keyboard", "phone", "tablet", "laptop", "internet", "website", "channel", "subscribe", "comment", "like",
    "share", "views", "million", "billion", "viral", "trending", "famous", "celebrity", "singer", "rapper", "band",
    "piano", "violin", "trumpet", "saxophone", "orchestra", "symphony", "melody", "harmony", "rhythm", "tempo",
    "volume", "speaker", "headphones", "microphone", "studio", "producer", "remix", "cover", "acoustic", "version",
    "original", "better", "worse", "perfect", "terrible", "boring", "exciting", "interesting", "cute", "adorable",
    "gorgeous", "handsome", "pretty", "ugly", "smart", "clever", "genius", "talent", "skills", "practice",
];

const CAMPAIGN1_TEMPLATES: &[&str] = &[
    "My top three things on earth right now :) :) 1 )))) Messi--the greatest player ever 2 )))) 77deals. com--the \
     cheapest online shopping site around 3 )))) this clip up here -- funniest and most interesting video I know!!!!",
    "Top three things on earth for me right now ;) ;) 1. my girlfriend -- love her 2. 77deals. com -- the cheapest \
     online shopping site around 3. the clip up here---- funniest and most interesting video I know :]:]:]",
];

const CAMPAIGN2_TEMPLATES: &[&str] = &[
    "Do not miss this people, the new tablet company is handing out free tablets on friday: freetabs.co.nr",
    "not a prank!!! visit this webpage to claim prizes, gifted phones waiting for first hundred visitors bit.ly/Qx7pz",
    "Earn real money working from home two hours daily -- secret method revealed on my channel page, check it",
    "Watch me level up my account at record speed, unlimited gems generator available via my profile link now",
];

const FILLER_WORDS: &[&str] = &["really", "guys", "omg", "wow", "lol", "seriously", "yes", "look"];

/// Applies token-level edits (insert, swap, misspell) and whitespace noise,
/// each token affected with probability `rate`. Rate 0 returns the input.
pub fn mutate_text<R: Rng>(template: &str, rate: f64, rng: &mut R) -> String {
    if rate <= 0.0 {
        return template.to_string();
    }
    let mut tokens: Vec<String> = template.split(' ').map(String::from).collect();
    let mut i = 0;
    while i < tokens.len() {
        if rng.random_bool(rate) {
            match rng.random_range(0..3) {
                0 => {
                    let w = FILLER_WORDS.choose(rng).expect("fillers");
                    tokens.insert(i + 1, w.to_string());
                    i += 1;
                }
                1 if i + 1 < tokens.len() => tokens.swap(i, i + 1),
                _ => tokens[i] = misspell(&tokens[i], rng),
            }
        }
        i += 1;
    }
    let mut out = String::new();
    for (k, t) in tokens.iter().enumerate() {
        if k > 0 {
            out.push_str(match rng.random_bool(rate) {
                true => ["  ", "\n", " \n ", "\u{2028}"].choose(rng).expect("gaps"),
                false => " ",
            });
        }
        out.push_str(t);
    }
    out
}

fn misspell<R: Rng>(word: &str, rng: &mut R) -> String {
    let mut chars: Vec<char> = word.chars().collect();
    let letters: Vec<usize> = (0..chars.len()).filter(|&i| chars[i].is_ascii_alphabetic()).collect();
    let Some(&at) = letters.choose(rng) else {
        return word.to_string();
    };
    match rng.random_range(0..3) {
        0 => chars.insert(at, chars[at]),
        1 if letters.len() > 2 => {
            chars.remove(at);
        }
        _ => chars[at] = (b'a' + rng.random_range(0..26u8)) as char,
    }
    chars.into_iter().collect()
}

fn background_text<R: Rng>(rng: &mut R) -> String {
    let n = rng.random_range(3..=12);
    let mut words: Vec<String> = (0..n).map(|_| BACKGROUND_WORDS.choose(rng).expect("vocab").to_string()).collect();
    if rng.random_bool(0.3) {
        words[0] = capitalize(&words[0]);
    }
    let mut text = words.join(" ");
    if rng.random_bool(0.4) {
        text.push_str(["!", "!!!", " :)", "?", " <3", "..."].choose(rng).expect("endings"));
    }
    text
}

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    c.next().map(|f| f.to_uppercase().chain(c).collect()).unwrap_or_default()
}

struct Emitter {
    start: DateTime<Utc>,
    length_secs: i64,
    records: Vec<CommentRecord>,
    ground_truth: BTreeMap<String, Group>,
}

impl Emitter {
    #[allow(clippy::too_many_arguments)]
    fn emit<R: Rng>(&mut self, rng: &mut R, window: usize, tag: &str, user: &str, group: Group, video: &str, text: String, hint: bool) {
        let offset = rng.random_range(0..self.length_secs);
        let at = self.start + Duration::seconds(self.length_secs * window as i64 + offset);
        let comment_id = format!("w{window:02}-{tag}-{:06}", self.records.len());
        self.records.push(CommentRecord {
            comment_id,
            user_id: user.to_string(),
            video_id: video.to_string(),
            published_at: at,
            text,
            spam_hint: hint,
        });
        self.ground_truth.insert(user.to_string(), group);
    }
}

pub fn video_id(i: usize) -> String {
    format!("vid{i:04}")
}

pub fn generate_scenario(cfg: &ScenarioConfig) -> Result<Scenario, SynthError> {
    cfg.validate()?;
    let (bg, c1, c2) = (&cfg.background, &cfg.campaign1, &cfg.campaign2);
    let mut em = Emitter {
        start: cfg.start_time()?,
        length_secs: cfg.window_hours * 3600,
        records: Vec::new(),
        ground_truth: BTreeMap::new(),
    };
    let videos: Vec<String> = (0..bg.n_videos).map(video_id).collect();
    let popularity = WeightedIndex::new((0..bg.n_videos).map(|i| ((i + 1) as f64).powf(-bg.popularity_exponent)))
        .map_err(|e| SynthError::Config(e.to_string()))?;
    let visit_sizes = WeightedIndex::new(&bg.videos_per_visit).map_err(|e| SynthError::Config(e.to_string()))?;

    for w in 0..cfg.n_windows {
        let mut rng = entity_rng(cfg.seed, &format!("background/window{w}"));
        let mut posted = 0;
        while posted < bg.comments_per_window {
            let user = format!("user{:05}", rng.random_range(0..bg.n_users));
            let k = visit_sizes.sample(&mut rng) + 1;
            let mut chosen = BTreeSet::new();
            while chosen.len() < k {
                chosen.insert(popularity.sample(&mut rng));
            }
            for v in chosen {
                let text = background_text(&mut rng);
                let hint = rng.random_bool(bg.hint_rate);
                em.emit(&mut rng, w, "bg", &user, Group::Background, &videos[v], text, hint);
                posted += 1;
            }
        }
    }

    for a in 0..c1.n_accounts {
        let user = format!("c1acct{a:02}");
        let template = CAMPAIGN1_TEMPLATES[a % CAMPAIGN1_TEMPLATES.len()];
        for &w in &c1.active_windows {
            let mut rng = entity_rng(cfg.seed, &format!("campaign1/{user}/window{w}"));
            let targets = rand::seq::index::sample(&mut rng, bg.n_videos, c1.n_videos_targeted).into_vec();
            let mut targets = targets;
            targets.sort_unstable();
            for v in targets {
                let text = mutate_text(template, c1.variation_rate, &mut rng);
                let hint = rng.random_bool(c1.hint_fraction);
                em.emit(&mut rng, w, "c1", &user, Group::Campaign1, &videos[v], text, hint);
            }
        }
    }

    if c2.n_accounts > 0 {
        let mut order: Vec<usize> = (0..bg.n_videos).collect();
        order.shuffle(&mut entity_rng(cfg.seed, "campaign2/videos"));
        for a in 0..c2.n_accounts {
            let user = format!("c2acct{a:02}");
            let own = &order[a * c2.videos_per_account..(a + 1) * c2.videos_per_account];
            for &w in &c2.active_windows {
                let mut rng = entity_rng(cfg.seed, &format!("campaign2/{user}/window{w}"));
                for &v in own {
                    let template = CAMPAIGN2_TEMPLATES[rng.random_range(0..c2.n_templates)];
                    let text = mutate_text(template, c2.variation_rate, &mut rng);
                    let hint = rng.random_bool(c2.hint_fraction);
                    em.emit(&mut rng, w, "c2", &user, Group::Campaign2, &videos[v], text, hint);
                }
            }
        }
    }

    em.records.sort_by(|a, b| a.published_at.cmp(&b.published_at).then_with(|| a.comment_id.cmp(&b.comment_id)));
    Ok(Scenario { records: em.records, ground_truth: em.ground_truth })
}

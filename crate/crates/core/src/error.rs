//! Error types for every module, plus the crate-wide [`Error`] wrapper.
//!
//! Each variant has a stable machine-readable code (see [`Error::code`]),
//! which the command-line front end puts in its JSON error objects.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: expected `key: value`, found `{text}`")]
    BadLine { line: usize, text: String },
    #[error("missing `{0}` line")]
    Missing(&'static str),
    #[error("line {line}: duplicate `{key}` line")]
    Duplicate { line: usize, key: String },
    #[error("generator names must be single ASCII letters, found `{0}`")]
    BadGeneratorName(String),
    #[error("generator `{0}` declared twice")]
    DuplicateGenerator(char),
    #[error("at most 26 generators are supported, found {0}")]
    TooManyGenerators(usize),
    #[error("unknown generator `{0}` in `{1}`")]
    UnknownGenerator(char, String),
    #[error("malformed word `{0}`")]
    BadWord(String),
    #[error("malformed group description `{0}`")]
    BadStrategy(String),
    #[error("strategy needs {expected} generators, the file declares {found}")]
    GeneratorCountMismatch { expected: usize, found: usize },
    #[error("malformed number `{0}`")]
    BadNumber(String),
    #[error("vertex `{0}` declared twice")]
    DuplicateVertex(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("self-loop at vertex `{0}`")]
    SelfLoop(String),
    #[error("edge `{0}` declared twice")]
    DuplicateEdge(String),
    #[error("piece `{0}` is empty or does not induce a connected subgraph")]
    BadPiece(String),
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("unsupported schema `{found}`, expected `{expected}`")]
    Schema { expected: &'static str, found: String },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("rewriting rules are not flagged confluent; no canonical form is available")]
    NonConfluentRules,
    #[error("letter index {0} is outside the alphabet")]
    UnsupportedWord(usize),
    #[error("relator `{0}` is not trivial under the chosen strategy")]
    RelatorMismatch(String),
    #[error("rule `{0}` does not decrease in shortlex order")]
    RuleNotDecreasing(String),
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CayleyError {
    #[error("ball exceeds the vertex cap of {cap}")]
    BallTooLarge { cap: usize },
    #[error("distance between vertices {u} and {v} cannot be certified inside the ball")]
    Truncated { u: usize, v: usize },
    #[error("growth table has {len} entries, at least 6 are needed")]
    TableTooShort { len: usize },
    #[error("vertex {0} is not in the ball")]
    VertexOutOfRange(usize),
    #[error("element `{0}` is not in the ball")]
    ElementOutsideBall(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QiError {
    #[error("domain must have at least two points")]
    DegenerateDomain,
    #[error("coverage {coverage} exceeds the bound {bound}")]
    NotQuasiIsometry { coverage: f64, bound: f64 },
    #[error("composition leaves the sampled ball at {0}")]
    OutOfBall(String),
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("unknown sample id `{0}`")]
    UnknownSample(String),
    #[error(transparent)]
    Cayley(#[from] CayleyError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HyperbolicityError {
    #[error("radius too small: {0}")]
    RadiusTooSmall(String),
    #[error("path is not a quasi-geodesic: indices {i} and {j} violate the bounds")]
    NotQuasiGeodesic { i: usize, j: usize },
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error(transparent)]
    Cayley(#[from] CayleyError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RelhypError {
    #[error("membership of `{0}` in a peripheral subgroup is undecided at this radius")]
    MembershipUnknown(String),
    #[error("invalid path: consecutive vertices at index {0} are not adjacent")]
    InvalidPath(usize),
    #[error("the path-pair corpus is empty")]
    EmptyCorpus,
    #[error("coset does not meet the ball")]
    EmptyCoset,
    #[error(transparent)]
    Cayley(#[from] CayleyError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TreeGradedError {
    #[error("tree-graded axioms have not been verified (or failed)")]
    AxiomsNotVerified,
    #[error("projection of `{vertex}` is not unique: {candidates:?}")]
    NonUniqueProjection { vertex: String, candidates: Vec<String> },
    #[error("unknown piece `{0}`")]
    UnknownPiece(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("loop of length {length} cannot be divided into {parts} parts")]
    LoopTooShort { length: usize, parts: usize },
    #[error("loop vertex {0} lies outside the certified half-radius region")]
    LeavesCertifiedRegion(usize),
    #[error("loop is not a closed edge path: {0}")]
    InvalidLoop(String),
    #[error("products K·F leave the ball")]
    ProductsLeaveBall,
    #[error(transparent)]
    Cayley(#[from] CayleyError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PingPongError {
    #[error("the action is undefined on every probe the certificate needs")]
    ActionUndefined,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Cayley(#[from] CayleyError),
    #[error(transparent)]
    Qi(#[from] QiError),
    #[error(transparent)]
    Hyperbolicity(#[from] HyperbolicityError),
    #[error(transparent)]
    Relhyp(#[from] RelhypError),
    #[error(transparent)]
    TreeGraded(#[from] TreeGradedError),
    #[error(transparent)]
    PingPong(#[from] PingPongError),
}

impl ParseError {
    pub fn code(&self) -> &'static str {
        match self {
            ParseError::UnknownKey { .. } => "PARSE_UNKNOWN_KEY",
            ParseError::BadLine { .. } => "PARSE_BAD_LINE",
            ParseError::Missing(_) => "PARSE_MISSING",
            ParseError::Duplicate { .. } => "PARSE_DUPLICATE",
            ParseError::BadGeneratorName(_) => "PARSE_BAD_GENERATOR_NAME",
            ParseError::DuplicateGenerator(_) => "PARSE_DUPLICATE_GENERATOR",
            ParseError::TooManyGenerators(_) => "PARSE_TOO_MANY_GENERATORS",
            ParseError::UnknownGenerator(..) => "PARSE_UNKNOWN_GENERATOR",
            ParseError::BadWord(_) => "PARSE_BAD_WORD",
            ParseError::BadStrategy(_) => "PARSE_BAD_STRATEGY",
            ParseError::GeneratorCountMismatch { .. } => "PARSE_GENERATOR_COUNT",
            ParseError::BadNumber(_) => "PARSE_BAD_NUMBER",
            ParseError::DuplicateVertex(_) => "PARSE_DUPLICATE_VERTEX",
            ParseError::UnknownVertex(_) => "PARSE_UNKNOWN_VERTEX",
            ParseError::SelfLoop(_) => "PARSE_SELF_LOOP",
            ParseError::DuplicateEdge(_) => "PARSE_DUPLICATE_EDGE",
            ParseError::BadPiece(_) => "PARSE_BAD_PIECE",
            ParseError::Json(_) => "PARSE_JSON",
            ParseError::Schema { .. } => "PARSE_SCHEMA",
        }
    }
}

impl GroupError {
    pub fn code(&self) -> &'static str {
        match self {
            GroupError::NonConfluentRules => "NON_CONFLUENT_RULES",
            GroupError::UnsupportedWord(_) => "UNSUPPORTED_WORD",
            GroupError::RelatorMismatch(_) => "RELATOR_MISMATCH",
            GroupError::RuleNotDecreasing(_) => "RULE_NOT_DECREASING",
            GroupError::BadParameter(_) => "BAD_PARAMETER",
            GroupError::Parse(e) => e.code(),
        }
    }
}

impl CayleyError {
    pub fn code(&self) -> &'static str {
        match self {
            CayleyError::BallTooLarge { .. } => "BALL_TOO_LARGE",
            CayleyError::Truncated { .. } => "TRUNCATED",
            CayleyError::TableTooShort { .. } => "TABLE_TOO_SHORT",
            CayleyError::VertexOutOfRange(_) => "VERTEX_OUT_OF_RANGE",
            CayleyError::ElementOutsideBall(_) => "ELEMENT_OUTSIDE_BALL",
            CayleyError::Group(e) => e.code(),
        }
    }
}

impl QiError {
    pub fn code(&self) -> &'static str {
        match self {
            QiError::DegenerateDomain => "DEGENERATE_DOMAIN",
            QiError::NotQuasiIsometry { .. } => "NOT_QUASI_ISOMETRY",
            QiError::OutOfBall(_) => "OUT_OF_BALL",
            QiError::InvalidMetric(_) => "INVALID_METRIC",
            QiError::InvalidMap(_) => "INVALID_MAP",
            QiError::UnknownSample(_) => "UNKNOWN_SAMPLE",
            QiError::Cayley(e) => e.code(),
        }
    }
}

impl HyperbolicityError {
    pub fn code(&self) -> &'static str {
        match self {
            HyperbolicityError::RadiusTooSmall(_) => "RADIUS_TOO_SMALL",
            HyperbolicityError::NotQuasiGeodesic { .. } => "NOT_QUASI_GEODESIC",
            HyperbolicityError::InvalidPath(_) => "INVALID_QUASI_GEODESIC_PATH",
            HyperbolicityError::Cayley(e) => e.code(),
        }
    }
}

impl RelhypError {
    pub fn code(&self) -> &'static str {
        match self {
            RelhypError::MembershipUnknown(_) => "MEMBERSHIP_UNKNOWN",
            RelhypError::InvalidPath(_) => "INVALID_PATH",
            RelhypError::EmptyCorpus => "EMPTY_CORPUS",
            RelhypError::EmptyCoset => "EMPTY_COSET",
            RelhypError::Cayley(e) => e.code(),
        }
    }
}

impl TreeGradedError {
    pub fn code(&self) -> &'static str {
        match self {
            TreeGradedError::AxiomsNotVerified => "AXIOMS_NOT_VERIFIED",
            TreeGradedError::NonUniqueProjection { .. } => "NON_UNIQUE_PROJECTION",
            TreeGradedError::UnknownPiece(_) => "UNKNOWN_PIECE",
            TreeGradedError::UnknownVertex(_) => "UNKNOWN_VERTEX",
            TreeGradedError::LoopTooShort { .. } => "LOOP_TOO_SHORT",
            TreeGradedError::LeavesCertifiedRegion(_) => "LEAVES_CERTIFIED_REGION",
            TreeGradedError::InvalidLoop(_) => "INVALID_LOOP",
            TreeGradedError::ProductsLeaveBall => "PRODUCTS_LEAVE_BALL",
            TreeGradedError::Cayley(e) => e.code(),
        }
    }
}

impl PingPongError {
    pub fn code(&self) -> &'static str {
        match self {
            PingPongError::ActionUndefined => "ACTION_UNDEFINED",
        }
    }
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse(e) => e.code(),
            Error::Group(e) => e.code(),
            Error::Cayley(e) => e.code(),
            Error::Qi(e) => e.code(),
            Error::Hyperbolicity(e) => e.code(),
            Error::Relhyp(e) => e.code(),
            Error::TreeGraded(e) => e.code(),
            Error::PingPong(e) => e.code(),
        }
    }
}

//! Static token table, role scopes and per-role field masking.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub const MASK: &str = "***";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Admin,
    Operator,
    Tenant,
    Readonly,
}

impl Role {
    pub const ALL: [Role; 4] = [Role::Admin, Role::Operator, Role::Tenant, Role::Readonly];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Admin => "admin",
            Role::Operator => "operator",
            Role::Tenant => "tenant",
            Role::Readonly => "readonly",
        }
    }

    /// Scope patterns of the form `METHOD /path-glob`, where `*` matches any
    /// run of characters.
    pub fn default_scopes(self) -> Vec<String> {
        let s: &[&str] = match self {
            Role::Admin => &["* /*"],
            Role::Operator => &[
                "* /live*",
                "* /docs*",
                "* /graph*",
                "* /insights*",
                "* /subscriptions*",
                "* /catalog*",
                "* /infer*",
                "* /sim*",
            ],
            Role::Tenant => &[
                "GET /live*",
                "GET /docs*",
                "GET /graph*",
                "GET /insights*",
                "* /subscriptions*",
                "* /catalog*",
                "POST /infer*",
            ],
            Role::Readonly => &["GET /live*", "GET /docs*", "GET /graph*", "GET /insights*"],
        };
        s.iter().map(|p| p.to_string()).collect()
    }

    /// Fields rendered as `***` for this role, as `entity.attribute`.
    pub fn default_masked_fields(self) -> Vec<String> {
        match self {
            Role::Tenant | Role::Readonly => vec!["ue.position".to_string()],
            Role::Admin | Role::Operator => Vec::new(),
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenEntry {
    pub token: String,
    pub principal: String,
    pub role: Role,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scopes: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub masked_fields: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Principal {
    pub id: String,
    pub role: Role,
    pub scopes: Vec<String>,
    pub masked_fields: Vec<String>,
}

impl Principal {
    pub fn is_allowed(&self, method: &str, path: &str) -> bool {
        self.scopes.iter().any(|scope| scope_matches(scope, method, path))
    }

    pub fn masks(&self, entity_type: &str, attribute: &str) -> bool {
        self.masked_fields
            .iter()
            .any(|f| f.split_once('.') == Some((entity_type, attribute)))
    }
}

/// Token to principal table. Empty means every authenticated route is denied.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthTable {
    #[serde(default)]
    pub tokens: Vec<TokenEntry>,
}

impl AuthTable {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// One token per role, named after the role. For tests and local runs.
    pub fn with_default_roles() -> Self {
        Self {
            tokens: Role::ALL
                .into_iter()
                .map(|r| TokenEntry {
                    token: format!("{r}-token"),
                    principal: r.to_string(),
                    role: r,
                    scopes: None,
                    masked_fields: None,
                })
                .collect(),
        }
    }

    pub fn authenticate(&self, token: Option<&str>) -> Option<Principal> {
        let token = token?;
        let entry = self.tokens.iter().find(|e| e.token == token)?;
        Some(Principal {
            id: entry.principal.clone(),
            role: entry.role,
            scopes: entry
                .scopes
                .clone()
                .unwrap_or_else(|| entry.role.default_scopes()),
            masked_fields: entry
                .masked_fields
                .clone()
                .unwrap_or_else(|| entry.role.default_masked_fields()),
        })
    }

    pub fn roles(&self) -> BTreeMap<String, Role> {
        self.tokens
            .iter()
            .map(|e| (e.principal.clone(), e.role))
            .collect()
    }
}

pub fn scope_matches(scope: &str, method: &str, path: &str) -> bool {
    let Some((m, p)) = scope.split_once(' ') else {
        return false;
    };
    (m == "*" || m.eq_ignore_ascii_case(method)) && glob_match(p, path)
}

/// `*` matches any (possibly empty) run of characters; everything else is literal.
pub fn glob_match(pattern: &str, text: &str) -> bool {
    let p = pattern.as_bytes();
    let t = text.as_bytes();
    let (mut pi, mut ti) = (0, 0);
    let mut star: Option<(usize, usize)> = None;
    while ti < t.len() {
        if pi < p.len() && p[pi] == b'*' {
            star = Some((pi, ti));
            pi += 1;
        } else if pi < p.len() && p[pi] == t[ti] {
            pi += 1;
            ti += 1;
        } else if let Some((sp, st)) = star {
            pi = sp + 1;
            ti = st + 1;
            star = Some((sp, st + 1));
        } else {
            return false;
        }
    }
    p[pi..].iter().all(|&c| c == b'*')
}

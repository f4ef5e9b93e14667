//! Demo wiki seeded by `shawn init`: a few playwrights, a small social
//! network with a transitive acquaintance relation, typed dates, and the
//! special pages.

use crate::markup::PageName;
use crate::store::{Store, StoreError};

pub const DEMO_PAGES: &[(&str, &str)] = &[
    (
        "HomePage",
        "# Welcome\n\
         \n\
         Every page in this wiki is a concept. Write prose as usual and add facts\n\
         as lines of the form `Property: value`; each one becomes a triple about\n\
         the page, and the navigation around it picks the triple up immediately.\n\
         \n\
         - Playwrights: [[Shakespeare]], [[Marlowe]], [[Jonson]]\n\
         - People: JohnDoe, JaneRoe, MaxMustermann, ErikaMustermann\n\
         - Relationship types are listed on RelationshipType\n\
         \n\
         The RDF behind the wiki is served at http://localhost:8080/export.rdf\n",
    ),
    ("SideBar", "{{breadcrumbs}}\n{{forwardlinks}}\n{{sametype}}\n"),
    ("GotoBar", "HomePage AllPages RelationshipType\n"),
    (
        "UriMap",
        "Person: <http://xmlns.com/foaf/0.1/Person>\n\
         KnowsPerson: <http://xmlns.com/foaf/0.1/knows>\n",
    ),
    ("Agent", "Anything that can act.\n"),
    ("Person", "TypeOf: Agent\n\nA human being.\n"),
    ("Place", "Somewhere on the map.\n"),
    ("City", "TypeOf: Place\n"),
    ("Topic", "A subject someone can be interested in.\n"),
    ("Leipzig", "InstanceOf: City\n"),
    ("Berlin", "InstanceOf: City\n"),
    ("Stratford", "InstanceOf: City\n"),
    ("SemanticWeb", "InstanceOf: Topic\n"),
    ("Wikis", "InstanceOf: Topic\n"),
    ("Play", "TypeOf: [[Literary work]]\n"),
    ("Literary work", "Something written.\n"),
    (
        "RelationshipType",
        "Pages that describe a relationship type. Each of them lists its triples.\n\n{{forwardlinks}}\n",
    ),
    ("isAuthorOf", "TypeOf: RelationshipType\n\nRelates an author to a work.\n\n{{triples}}\n"),
    ("LivesIn", "TypeOf: RelationshipType\n\nWhere a person lives.\n\n{{triples}}\n"),
    ("DateOfBirth", "TypeOf: RelationshipType\n\n{{triples}}\n"),
    ("InterestsIn", "TypeOf: RelationshipType\n\n{{triples}}\n"),
    (
        "KnowsPerson",
        "TypeOf: RelationshipType\nIsTransitive: Yes\n\nPersonal acquaintance. Friends of friends count too.\n\n{{triples}}\n",
    ),
    (
        "GotToKnowBy",
        "TypeOf: RelationshipType\nIsA: KnowsPerson\n\nHow one person got to know another.\n\n{{triples}}\n",
    ),
    (
        "Shakespeare",
        "InstanceOf: Person\nisAuthorOf: Hamlet\nDateOfBirth: 1564-04-26\nLivesIn: Stratford\n\n\
         English playwright and poet.\n",
    ),
    ("Marlowe", "InstanceOf: Person\nisAuthorOf: [[Doctor Faustus]]\nDateOfBirth: 1564-02-26\n"),
    ("Jonson", "InstanceOf: Person\nisAuthorOf: Volpone\nDateOfBirth: 1572-06-11\n"),
    ("Hamlet", "InstanceOf: Play\n\nA tragedy set in Denmark.\n"),
    ("Doctor Faustus", "InstanceOf: Play\n"),
    ("Volpone", "InstanceOf: Play\n"),
    (
        "JohnDoe",
        "InstanceOf: Person\nLivesIn: Leipzig\nKnowsPerson: JaneRoe\nInterestsIn: SemanticWeb\nDateOfBirth: 1948-03-20\n",
    ),
    (
        "JaneRoe",
        "InstanceOf: Person\nLivesIn: Leipzig\nKnowsPerson: MaxMustermann\nInterestsIn: SemanticWeb\nInterestsIn: Wikis\n",
    ),
    ("MaxMustermann", "InstanceOf: Person\nLivesIn: Berlin\nGotToKnowBy: ErikaMustermann\nInterestsIn: Wikis\n"),
    ("ErikaMustermann", "InstanceOf: Person\nLivesIn: Leipzig\n"),
];

/// Save every demo page that does not exist yet. Returns the number saved.
pub fn seed(store: &Store) -> Result<usize, StoreError> {
    let existing = store.snapshot();
    let mut saved = 0;
    for (name, source) in DEMO_PAGES {
        let name = PageName::new(*name).expect("demo page names are valid");
        if existing.contains_page(&name) {
            continue;
        }
        store.save_page(&name, source)?;
        saved += 1;
    }
    Ok(saved)
}

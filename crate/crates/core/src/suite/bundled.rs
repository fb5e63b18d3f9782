//! Bundled experiment templates.
//!
//! Each template reproduces one published design: the first lexicon row is
//! the published example sentence and the remaining rows are authored for
//! this toolkit. Suite files under `suites/` are generated from these with
//! `gapscope gen-suites` and checked against them in tests.

use indexmap::IndexMap;

use super::template::{Skeleton, Template};
use super::{
    Factor, MetricKind, Region, SuiteMetadata, ABSENT, FILLER, GAP, MATCH, MATCHING, MISMATCHING,
    PRESENT, STRUCTURE,
};

const PUNCT_NOTE: &str =
    "terminal punctuation sits in its own 'end' region and is never measured";

/// Item count per bundled suite, keyed by suite name.
pub const ITEM_COUNTS: &[(&str, usize)] = &[
    ("unboundedness", 23),
    ("hierarchy", 24),
    ("wh_island", 24),
    ("adjunct_island", 22),
    ("complex_np_island", 22),
    ("coordination_island", 20),
    ("subject_island", 20),
    ("sentential_subject_island", 20),
    ("left_branch_island", 20),
    ("gender_wh_island", 30),
    ("gender_adjunct_island", 30),
    ("gender_complex_np_island", 30),
    ("gender_coordination_island", 30),
    ("gender_subject_island", 30),
    ("gender_sentential_subject_island", 30),
];

/// Every bundled template paired with the number of items to expand.
pub fn templates() -> Vec<(Template, usize)> {
    let all = vec![
        unboundedness(),
        hierarchy(),
        wh_island(),
        adjunct_island(),
        complex_np_island(),
        coordination_island(),
        subject_island(),
        sentential_subject_island(),
        left_branch_island(),
        gender_wh_island(),
        gender_adjunct_island(),
        gender_complex_np_island(),
        gender_coordination_island(),
        gender_subject_island(),
        gender_sentential_subject_island(),
    ];
    all.into_iter()
        .map(|t| {
            let n = ITEM_COUNTS
                .iter()
                .find(|(name, _)| *name == t.name)
                .map(|(_, n)| *n)
                .expect("every template has an item count");
            (t, n)
        })
        .collect()
}

struct Builder {
    template: Template,
}

impl Builder {
    fn new(name: &str, factors: Vec<Factor>, measure: &str, metric: MetricKind, source: &str) -> Self {
        Self {
            template: Template {
                name: name.to_string(),
                factors,
                measurement_region: measure.to_string(),
                metric,
                metadata: SuiteMetadata {
                    source: Some(source.to_string()),
                    item_count: None,
                    reconstructed: true,
                    notes: Some(PUNCT_NOTE.to_string()),
                },
                skeletons: Vec::new(),
                lexicon: IndexMap::new(),
                paired: Vec::new(),
            },
        }
    }

    fn sentence(&mut self, condition: &[(&str, &str)], regions: &[(&str, &str)]) {
        self.template.skeletons.push(Skeleton {
            condition: condition
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
            regions: regions.iter().map(|(n, t)| Region::new(n, t)).collect(),
        });
    }

    /// Add `|`-separated columns of `rows` as lexicon slots.
    fn columns(&mut self, slots: &[&str], rows: &[&str]) {
        for (col, slot) in slots.iter().enumerate() {
            let values = rows
                .iter()
                .map(|row| {
                    row.split('|')
                        .nth(col)
                        .unwrap_or_else(|| panic!("row '{row}' lacks column {col}"))
                        .trim()
                        .to_string()
                })
                .collect();
            self.template.lexicon.insert(slot.to_string(), values);
        }
        if slots.len() > 1 {
            self.template
                .paired
                .push(slots.iter().map(|s| s.to_string()).collect());
        }
    }

    fn slot(&mut self, slot: &str, values: Vec<String>) {
        self.template.lexicon.insert(slot.to_string(), values);
    }

    fn build(self) -> Template {
        self.template
    }
}

fn yes_no(name: &str) -> Factor {
    Factor::new(name, &[PRESENT, ABSENT])
}

fn filler_gap_cells() -> [(&'static str, &'static str); 4] {
    [(PRESENT, PRESENT), (PRESENT, ABSENT), (ABSENT, PRESENT), (ABSENT, ABSENT)]
}

fn cycle(values: &[&str], n: usize, offset: usize) -> Vec<String> {
    (0..n)
        .map(|i| values[(i + offset) % values.len()].to_string())
        .collect()
}

// verb | object | post-gap phrase
const EVENTS: &[&str] = &[
    "insulted|your aunt|at the party",
    "praised|the chef|at the dinner",
    "visited|the senator|after the meeting",
    "thanked|the nurse|during the ceremony",
    "criticized|the director|at the conference",
    "hugged|the bride|at the wedding",
    "ignored|the waiter|at the restaurant",
    "interviewed|the athlete|after the game",
    "photographed|the mayor|at the parade",
    "greeted|the ambassador|at the airport",
    "blamed|the pilot|after the accident",
    "recognized|the singer|at the concert",
    "followed|the stranger|through the park",
    "called|the plumber|on monday",
    "hired|the lawyer|last spring",
    "met|the professor|at the library",
    "warned|the driver|near the bridge",
    "teased|the coach|during practice",
    "rescued|the hiker|on the mountain",
    "punished|the student|after school",
    "invited|the neighbor|to the picnic",
    "admired|the painter|at the gallery",
    "consulted|the doctor|before the surgery",
    "embarrassed|the host|at the banquet",
];

const SUBJECTS: &[&str] = &[
    "you", "the guests", "your friend", "the guide", "the reporter", "the officer", "my sister",
    "the tourists", "the children", "the clerk", "the critic", "our boss", "the captain",
    "the editor", "her cousin", "the janitor", "the nanny", "the sheriff", "the farmer",
    "the banker", "the tailor", "the twins", "the pianist", "the soldiers",
];

const GOAL_PHRASES: &[&str] = &[
    "delivered a challenge to", "sent a letter to", "gave a gift to", "handed the keys to",
    "showed the photos to", "offered a job to", "sold a car to", "lent money to",
    "mailed a package to", "read a poem to", "threw the ball to", "passed a note to",
    "brought flowers to", "taught a lesson to", "wrote a song to", "served dinner to",
    "told a secret to", "gave a warning to", "sang a song to", "paid the fee to",
    "sent an invitation to", "showed the painting to", "described the plan to",
    "explained the rules to",
];

const EMBEDDERS: &[&str] = &[
    "the gardener reported", "the butler said", "the hostess believed", "her aunt suspected",
    "the detective claimed", "the maid thought", "the guard insisted", "the cook assumed",
    "the driver heard", "the nurse feared", "the banker guessed",
];

fn unboundedness() -> Template {
    let depths = ["0", "1", "2", "3", "4"];
    let mut b = Builder::new(
        "unboundedness",
        vec![
            yes_no(FILLER),
            yes_no(GAP),
            Factor::new("gap_position", &["object", "goal"]),
            Factor::new("depth", &depths),
        ],
        "post_gap",
        MetricKind::LicensingInteraction,
        "sentential embedding depth 0-4 with object or goal gaps",
    );
    for (filler, gap) in filler_gap_cells() {
        for position in ["object", "goal"] {
            for (depth, d) in depths.iter().enumerate() {
                let embedding = (1..=depth)
                    .map(|k| format!("{{emb{k}}}"))
                    .collect::<Vec<_>>()
                    .join(" ");
                let verb = if position == "object" { "{verb}" } else { "{goal_verb}" };
                b.sentence(
                    &[(FILLER, filler), (GAP, gap), ("gap_position", position), ("depth", d)],
                    &[
                        ("prefix", "I know"),
                        ("filler", if filler == PRESENT { "who" } else { "that" }),
                        ("embedding", &embedding),
                        ("subject", "{subject}"),
                        ("verb", verb),
                        ("gap_obj", if gap == PRESENT { "" } else { "{object}" }),
                        ("post_gap", "{post}"),
                        ("end", "."),
                    ],
                );
            }
        }
    }
    let n = 24;
    b.columns(&["verb", "object", "post"], EVENTS);
    b.slot("subject", cycle(SUBJECTS, n, 0));
    b.slot("goal_verb", cycle(GOAL_PHRASES, n, 0));
    for k in 1..=4 {
        b.slot(
            &format!("emb{k}"),
            (0..n)
                .map(|i| EMBEDDERS[(i * 3 + k - 1) % EMBEDDERS.len()].to_string())
                .collect(),
        );
    }
    b.build()
}

// knower | embedded subject+verb | embedded object | matrix verb | matrix object | tail
const HIERARCHY: &[&str] = &[
    "the mayor|the criminal shot|the teller|shocked|the jury|during the trial",
    "the coach|the referee fouled|the striker|angered|the fans|after the match",
    "the principal|the bully pushed|the new boy|upset|the parents|at the meeting",
    "the editor|the senator bribed|the judge|alarmed|the readers|last month",
    "the captain|the pirate robbed|the merchant|frightened|the sailors|during the voyage",
    "the manager|the intern insulted|the client|surprised|the staff|at the party",
    "the sheriff|the outlaw kidnapped|the banker|terrified|the town|that summer",
    "the doctor|the nurse ignored|the patient|worried|the family|at the hospital",
    "the teacher|the student copied|the genius|disappointed|the class|before the exam",
    "the detective|the butler poisoned|the duke|stunned|the guests|after dinner",
    "the reporter|the general betrayed|the king|outraged|the nation|during the war",
    "the landlord|the tenant attacked|the plumber|disturbed|the neighbors|last night",
    "the critic|the actor slapped|the director|amused|the audience|at the premiere",
    "the judge|the witness accused|the defendant|confused|the lawyers|during the hearing",
    "the professor|the dean fired|the researcher|saddened|the department|this year",
    "the guard|the prisoner tricked|the warden|embarrassed|the staff|after the escape",
    "the pastor|the thief followed|the widow|scared|the congregation|on sunday",
    "the owner|the chef fired|the waiter|shocked|the customers|at the restaurant",
    "the admiral|the spy photographed|the officer|alarmed|the navy|during the crisis",
    "the queen|the knight defeated|the giant|delighted|the court|after the battle",
    "the farmer|the wolf chased|the lamb|upset|the children|near the barn",
    "the lawyer|the banker cheated|the investor|angered|the board|at the hearing",
    "the nurse|the surgeon blamed|the assistant|troubled|the hospital|after the operation",
    "the minister|the rebels captured|the governor|shocked|the country|during the election",
];

fn hierarchy() -> Template {
    let mut b = Builder::new(
        "hierarchy",
        vec![yes_no(FILLER), yes_no(GAP), Factor::new(STRUCTURE, &["subject", "matrix"])],
        "post_gap",
        MetricKind::LicensingInteraction,
        "filler inside a sentential subject with the gap in that subject or in the matrix clause",
    );
    for (filler, gap) in filler_gap_cells() {
        let filler_text = if filler == PRESENT { "who" } else { "that" };
        b.sentence(
            &[(FILLER, filler), (GAP, gap), (STRUCTURE, "subject")],
            &[
                ("prefix", "the fact that {knower} knows"),
                ("filler", filler_text),
                ("embedded", "{embedded}"),
                ("gap_obj", if gap == PRESENT { "" } else { "{emb_obj}" }),
                ("post_gap", "{matrix_verb} {matrix_obj}"),
                ("tail", "{tail}"),
                ("end", "."),
            ],
        );
        b.sentence(
            &[(FILLER, filler), (GAP, gap), (STRUCTURE, "matrix")],
            &[
                ("prefix", "the fact that {knower} knows"),
                ("filler", filler_text),
                ("embedded", "{embedded} {emb_obj} {matrix_verb}"),
                ("gap_obj", if gap == PRESENT { "" } else { "{matrix_obj}" }),
                ("post_gap", "{tail}"),
                ("tail", ""),
                ("end", "."),
            ],
        );
    }
    b.columns(
        &["knower", "embedded", "emb_obj", "matrix_verb", "matrix_obj", "tail"],
        HIERARCHY,
    );
    b.build()
}

fn island_factors(control: &str, island: &str) -> Vec<Factor> {
    vec![yes_no(FILLER), yes_no(GAP), Factor::new(STRUCTURE, &[control, island])]
}

const NAMES: &[&str] = &[
    "Alex", "Mary", "John", "Sarah", "David", "Emma", "Chris", "Laura", "Peter", "Kate", "Sam",
    "Lisa",
];

fn wh_island() -> Template {
    let mut b = Builder::new(
        "wh_island",
        island_factors("control", "island"),
        "post_gap",
        MetricKind::LicensingInteraction,
        "wh-island: embedded clause introduced by 'whether'",
    );
    for (filler, gap) in filler_gap_cells() {
        for structure in ["control", "island"] {
            b.sentence(
                &[(FILLER, filler), (GAP, gap), (STRUCTURE, structure)],
                &[
                    ("prefix", "I know"),
                    ("filler", if filler == PRESENT { "who" } else { "that" }),
                    ("matrix", "{name} said"),
                    ("comp", if structure == "island" { "whether" } else { "" }),
                    ("embedded", "{subject} {verb}"),
                    ("gap_obj", if gap == PRESENT { "" } else { "{object}" }),
                    ("post_gap", "{post}"),
                    ("end", "."),
                ],
            );
        }
    }
    let n = 24;
    let subjects = [
        "your friend", "the guests", "the reporter", "my sister", "the clerk", "the children",
        "the officer", "our boss",
    ];
    b.columns(
        &["verb", "object", "post"],
        &[
            "insulted|your aunt|yesterday",
            "praised|the chef|last night",
            "visited|the senator|this morning",
            "thanked|the nurse|on friday",
            "criticized|the director|yesterday",
            "hugged|the bride|last night",
            "ignored|the waiter|this morning",
            "interviewed|the athlete|on friday",
            "photographed|the mayor|yesterday",
            "greeted|the ambassador|last night",
            "blamed|the pilot|this morning",
            "recognized|the singer|on friday",
            "followed|the stranger|yesterday",
            "called|the plumber|last night",
            "hired|the lawyer|this morning",
            "met|the professor|on friday",
            "warned|the driver|yesterday",
            "teased|the coach|last night",
            "rescued|the hiker|this morning",
            "punished|the student|on friday",
            "invited|the neighbor|yesterday",
            "admired|the painter|last night",
            "consulted|the doctor|this morning",
            "embarrassed|the host|on friday",
        ],
    );
    b.slot("name", cycle(NAMES, n, 0));
    b.slot("subject", cycle(&subjects, n, 0));
    b.build()
}

fn adjunct_island() -> Template {
    let mut b = Builder::new(
        "adjunct_island",
        island_factors("control", "island"),
        "post_gap",
        MetricKind::LicensingInteraction,
        "adjunct island: gap inside an 'after' clause",
    );
    for (filler, gap) in filler_gap_cells() {
        for structure in ["control", "island"] {
            b.sentence(
                &[(FILLER, filler), (GAP, gap), (STRUCTURE, structure)],
                &[
                    ("prefix", "I know"),
                    ("filler", if filler == PRESENT { "what" } else { "that" }),
                    (
                        "adjunct",
                        if structure == "island" { "{other} got mad after" } else { "" },
                    ),
                    ("embedded", "{subject} {verb}"),
                    ("gap_obj", if gap == PRESENT { "" } else { "{object}" }),
                    ("post_gap", "{post}"),
                    ("end", "."),
                ],
            );
        }
    }
    b.columns(
        &["other", "subject", "verb", "object", "post"],
        &[
            "the patron|the librarian|placed|the book|on the wrong shelf",
            "the customer|the cashier|dropped|the receipt|on the floor",
            "the teacher|the student|hid|the note|under the desk",
            "the guest|the waiter|spilled|the wine|on the table",
            "the tenant|the landlord|left|the package|in the hallway",
            "the boss|the secretary|filed|the report|in the cabinet",
            "the chef|the cook|burned|the bread|in the oven",
            "the owner|the mechanic|parked|the truck|behind the shop",
            "the mother|the boy|threw|the ball|over the fence",
            "the coach|the player|forgot|the helmet|at the stadium",
            "the farmer|the worker|stored|the hay|in the barn",
            "the client|the lawyer|signed|the contract|at the office",
            "the director|the actor|memorized|the script|before rehearsal",
            "the buyer|the seller|painted|the house|last summer",
            "the captain|the sailor|tied|the rope|to the mast",
            "the neighbor|the gardener|planted|the tree|near the gate",
            "the editor|the writer|revised|the chapter|over the weekend",
            "the nurse|the doctor|ordered|the test|this morning",
            "the manager|the clerk|misplaced|the keys|in the lobby",
            "the host|the butler|served|the soup|in the dining room",
            "the professor|the assistant|graded|the exams|during the break",
            "the sheriff|the deputy|locked|the door|after midnight",
        ],
    );
    b.build()
}

fn complex_np_island() -> Template {
    let mut b = Builder::new(
        "complex_np_island",
        island_factors("control", "island"),
        "post_gap",
        MetricKind::LicensingInteraction,
        "complex NP island: gap inside a relative clause on a lexical head noun",
    );
    for (filler, gap) in filler_gap_cells() {
        for structure in ["control", "island"] {
            let (rel, obj) = if structure == "island" {
                ("{head} that {rel_verb}", "{rel_obj}")
            } else {
                ("", "{head}")
            };
            b.sentence(
                &[(FILLER, filler), (GAP, gap), (STRUCTURE, structure)],
                &[
                    ("prefix", "I know"),
                    ("filler", if filler == PRESENT { "what" } else { "that" }),
                    ("embedded", "{subject} {verb}"),
                    ("relative", rel),
                    ("gap_obj", if gap == PRESENT { "" } else { obj }),
                    ("post_gap", "{post}"),
                    ("end", "."),
                ],
            );
        }
    }
    b.columns(
        &["subject", "verb", "head", "rel_verb", "rel_obj", "post"],
        &[
            "the actress|bought|the painting|depicted|the sunset|yesterday",
            "the collector|sold|the photo|showed|the harbor|last week",
            "the student|read|the book|described|the war|this morning",
            "the tourist|found|the map|marked|the treasure|yesterday",
            "the teacher|praised|the essay|discussed|the election|last week",
            "the critic|reviewed|the film|portrayed|the king|this morning",
            "the child|drew|the picture|showed|the house|yesterday",
            "the editor|rejected|the article|criticized|the mayor|last week",
            "the banker|signed|the letter|mentioned|the loan|this morning",
            "the scientist|published|the paper|explained|the theory|yesterday",
            "the boy|watched|the show|featured|the dragon|last week",
            "the judge|read|the report|described|the crime|this morning",
            "the farmer|bought|the tractor|replaced|the horse|yesterday",
            "the lawyer|filed|the memo|summarized|the case|last week",
            "the singer|recorded|the song|praised|the city|this morning",
            "the nurse|copied|the chart|listed|the medicine|yesterday",
            "the pilot|checked|the manual|explained|the engine|last week",
            "the museum|acquired|the statue|honored|the poet|this morning",
            "the writer|finished|the novel|described|the island|yesterday",
            "the chef|tasted|the sauce|contained|the garlic|last week",
            "the senator|quoted|the speech|attacked|the law|this morning",
            "the director|filmed|the scene|showed|the battle|yesterday",
        ],
    );
    b.build()
}

fn coordination_island() -> Template {
    let mut b = Builder::new(
        "coordination_island",
        island_factors("control", "island"),
        "post_gap",
        MetricKind::LicensingInteraction,
        "coordination island: gap as the second conjunct of a coordinated object",
    );
    for (filler, gap) in filler_gap_cells() {
        for structure in ["control", "island"] {
            b.sentence(
                &[(FILLER, filler), (GAP, gap), (STRUCTURE, structure)],
                &[
                    ("prefix", "I know"),
                    ("filler", if filler == PRESENT { "what" } else { "that" }),
                    ("embedded", "{subject} {verb}"),
                    ("conjunct", if structure == "island" { "{first} and" } else { "" }),
                    ("gap_obj", if gap == PRESENT { "" } else { "{second}" }),
                    ("post_gap", "{post}"),
                    ("end", "."),
                ],
            );
        }
    }
    b.columns(
        &["subject", "verb", "first", "second", "post"],
        &[
            "the man|bought|the painting|the lamp|at the antique shop",
            "the woman|sold|the bicycle|the tent|at the market",
            "the boy|lost|the wallet|the phone|at the station",
            "the girl|found|the ring|the necklace|on the beach",
            "the chef|cooked|the fish|the rice|in the kitchen",
            "the farmer|planted|the corn|the beans|in the field",
            "the student|borrowed|the laptop|the charger|from the library",
            "the thief|stole|the jewels|the cash|from the safe",
            "the tourist|photographed|the bridge|the tower|in the morning",
            "the artist|painted|the barn|the river|in the spring",
            "the mechanic|repaired|the engine|the brakes|at the garage",
            "the child|broke|the vase|the mirror|in the hallway",
            "the waiter|carried|the plates|the glasses|to the table",
            "the author|wrote|the poem|the letter|at the cafe",
            "the neighbor|washed|the car|the windows|on saturday",
            "the clerk|ordered|the paper|the ink|for the office",
            "the doctor|examined|the wound|the fracture|at the clinic",
            "the baker|baked|the bread|the cake|before dawn",
            "the pilot|checked|the wings|the fuel|before takeoff",
            "the janitor|cleaned|the floor|the stairs|after the concert",
        ],
    );
    b.build()
}

fn subject_island() -> Template {
    let mut b = Builder::new(
        "subject_island",
        island_factors("control", "island"),
        "post_gap",
        MetricKind::LicensingInteraction,
        "subject island: gap inside a relative clause attached to the subject",
    );
    for (filler, gap) in filler_gap_cells() {
        for structure in ["control", "island"] {
            let island = structure == "island";
            let filler_text = match (filler == PRESENT, island) {
                (false, _) => "that",
                (true, false) => "what",
                (true, true) => "who",
            };
            let gap_text = match (gap == PRESENT, island) {
                (true, _) => "",
                (false, false) => "{subject}",
                (false, true) => "{rel_obj}",
            };
            b.sentence(
                &[(FILLER, filler), (GAP, gap), (STRUCTURE, structure)],
                &[
                    ("prefix", "I know"),
                    ("filler", filler_text),
                    ("relative", if island { "{subject} that {rel_verb}" } else { "" }),
                    ("gap_obj", gap_text),
                    ("post_gap", "{verb}"),
                    ("tail", "{rest}"),
                    ("end", "."),
                ],
            );
        }
    }
    b.columns(
        &["subject", "rel_verb", "rel_obj", "verb", "rest"],
        &[
            "the painting|depicted|the queen|fetched|a high price",
            "the statue|honored|the general|attracted|a large crowd",
            "the photo|showed|the senator|caused|a scandal",
            "the book|described|the explorer|won|an award",
            "the song|praised|the soldier|became|a hit",
            "the film|portrayed|the president|earned|a fortune",
            "the article|criticized|the mayor|started|a debate",
            "the poem|mocked|the bishop|angered|the church",
            "the letter|accused|the banker|reached|the newspapers",
            "the portrait|showed|the duchess|sold|for millions",
            "the report|blamed|the captain|surprised|the committee",
            "the play|satirized|the king|offended|the court",
            "the cartoon|mocked|the minister|went|viral",
            "the memoir|exposed|the coach|topped|the charts",
            "the documentary|followed|the climber|impressed|the critics",
            "the sculpture|depicted|the dancer|broke|a record",
            "the speech|attacked|the governor|received|loud applause",
            "the biography|praised|the inventor|inspired|many students",
            "the mural|celebrated|the farmer|drew|many visitors",
            "the rumor|concerned|the actress|spread|quickly",
        ],
    );
    b.build()
}

fn sentential_subject_island() -> Template {
    let mut b = Builder::new(
        "sentential_subject_island",
        island_factors("control", "island"),
        "post_gap",
        MetricKind::LicensingInteraction,
        "sentential subject island: gap inside an infinitival 'for ... to' subject",
    );
    for (filler, gap) in filler_gap_cells() {
        for structure in ["control", "island"] {
            let island = structure == "island";
            b.sentence(
                &[(FILLER, filler), (GAP, gap), (STRUCTURE, structure)],
                &[
                    ("prefix", "I know"),
                    ("filler", if filler == PRESENT { "who" } else { "that" }),
                    (
                        "clause",
                        if island { "for {subject} to {base}" } else { "{subject} {past}" },
                    ),
                    ("gap_obj", if gap == PRESENT { "" } else { "{object}" }),
                    ("post_gap", if island { "{predicate}" } else { "{time}" }),
                    ("end", "."),
                ],
            );
        }
    }
    b.columns(
        &["subject", "past", "base", "object", "time", "predicate"],
        &[
            "the seniors|defeated|defeat|the freshmen|last week|will be trivial",
            "the police|arrested|arrest|the smuggler|last night|will be easy",
            "the students|thanked|thank|the janitor|this morning|would be polite",
            "the team|hired|hire|the trainer|last year|will be expensive",
            "the voters|elected|elect|the senator|in november|would be surprising",
            "the nurses|helped|help|the patient|last night|will be necessary",
            "the children|visited|visit|the grandmother|on sunday|would be nice",
            "the company|fired|fire|the manager|last month|will be difficult",
            "the soldiers|rescued|rescue|the pilot|at dawn|would be dangerous",
            "the jury|convicted|convict|the banker|last week|will be hard",
            "the fans|cheered|cheer|the goalkeeper|last season|would be natural",
            "the board|promoted|promote|the engineer|in march|will be controversial",
            "the villagers|welcomed|welcome|the stranger|last winter|would be kind",
            "the critics|praised|praise|the director|this spring|will be unusual",
            "the reporters|interviewed|interview|the witness|yesterday|would be useful",
            "the doctors|treated|treat|the athlete|last summer|will be costly",
            "the guards|searched|search|the visitor|this morning|would be routine",
            "the teachers|punished|punish|the bully|on monday|will be fair",
            "the judges|disqualified|disqualify|the runner|last year|would be unfair",
            "the neighbors|invited|invite|the widow|on friday|will be thoughtful",
        ],
    );
    b.build()
}

fn left_branch_island() -> Template {
    let mut b = Builder::new(
        "left_branch_island",
        island_factors("whole_object", "left_branch"),
        "post_gap",
        MetricKind::LicensingInteraction,
        "left branch island: extraction of a prenominal modifier without its noun",
    );
    for (filler, gap) in filler_gap_cells() {
        for structure in ["whole_object", "left_branch"] {
            let left = structure == "left_branch";
            let filler_text = match (filler == PRESENT, left) {
                (false, _) => "that",
                (true, false) => "what {dimension} {noun}",
                (true, true) => "what {dimension}",
            };
            let gap_text = match (gap == PRESENT, left) {
                (false, _) => "{det} {value} {noun}",
                (true, false) => "",
                (true, true) => "{noun}",
            };
            b.sentence(
                &[(FILLER, filler), (GAP, gap), (STRUCTURE, structure)],
                &[
                    ("prefix", "I know"),
                    ("filler", filler_text),
                    ("embedded", "{subject} {verb}"),
                    ("gap_obj", gap_text),
                    ("post_gap", "{post}"),
                    ("end", "."),
                ],
            );
        }
    }
    b.columns(
        &["dimension", "noun", "det", "value", "subject", "verb", "post"],
        &[
            "color|car|a|red|you|bought|last week",
            "size|shirt|a|large|your brother|ordered|yesterday",
            "color|dress|a|blue|the bride|wore|on saturday",
            "brand|phone|an|expensive|the manager|chose|last month",
            "kind|dog|a|small|the family|adopted|last spring",
            "color|hat|a|green|the clown|wore|at the circus",
            "size|bed|a|huge|the couple|purchased|last winter",
            "kind|cake|a|chocolate|the baker|made|this morning",
            "color|paint|a|yellow|the painter|used|last summer",
            "shape|table|a|round|the designer|built|in june",
            "type|wine|a|french|the waiter|served|at dinner",
            "color|bicycle|a|black|the boy|rode|on sunday",
            "size|box|a|tiny|the clerk|shipped|yesterday",
            "kind|tree|an|oak|the gardener|planted|last fall",
            "color|scarf|a|purple|my aunt|knitted|last winter",
            "style|house|a|modern|the architect|designed|last year",
            "flavor|soup|a|spicy|the chef|prepared|at noon",
            "color|carpet|a|gray|the landlord|installed|in april",
            "type|engine|a|diesel|the mechanic|repaired|this week",
            "kind|bread|a|sweet|the student|baked|on friday",
        ],
    );
    b.build()
}

// noun | matching pronoun | mismatching pronoun; 15 masculine then 15 feminine
const GENDERED: &[&str] = &[
    "fireman|his|her", "husband|his|her", "king|his|her", "actor|his|her", "waiter|his|her",
    "uncle|his|her", "father|his|her", "brother|his|her", "monk|his|her", "priest|his|her",
    "businessman|his|her", "grandfather|his|her", "boyfriend|his|her", "nephew|his|her",
    "prince|his|her", "actress|her|his", "wife|her|his", "queen|her|his", "waitress|her|his",
    "aunt|her|his", "mother|her|his", "sister|her|his", "nun|her|his", "ballerina|her|his",
    "businesswoman|her|his", "grandmother|her|his", "girlfriend|her|his", "niece|her|his",
    "princess|her|his", "landlady|her|his",
];

const GENDER_N: usize = 30;

struct GenderFrame<'a> {
    control: &'a [(&'a str, &'a str)],
    island: &'a [(&'a str, &'a str)],
}

fn gender_suite(name: &str, source: &str, frame: GenderFrame<'_>) -> Builder {
    let mut b = Builder::new(
        name,
        vec![
            Factor::new(MATCH, &[MATCHING, MISMATCHING]),
            Factor::new(STRUCTURE, &["control", "island"]),
        ],
        "pronoun",
        MetricKind::ExpectationEffect,
        source,
    );
    for m in [MATCHING, MISMATCHING] {
        let pronoun = if m == MATCHING { "{match_pronoun}" } else { "{mismatch_pronoun}" };
        for (structure, regions) in [("control", frame.control), ("island", frame.island)] {
            let mut all = vec![("subject", "the {noun}")];
            for &(region, text) in regions {
                all.push((region, if text == "PRONOUN" { pronoun } else { text }));
            }
            all.push(("end", "."));
            b.sentence(&[(MATCH, m), (STRUCTURE, structure)], &all);
        }
    }
    b.columns(&["noun", "match_pronoun", "mismatch_pronoun"], GENDERED);
    b
}

fn gender_wh_island() -> Template {
    let mut b = gender_suite(
        "gender_wh_island",
        "gender expectation through a wh-island",
        GenderFrame {
            control: &[
                ("verb", "said"),
                ("comp", ""),
                ("clause", "they {verb}"),
                ("pronoun", "PRONOUN"),
                ("rest", "{object}"),
            ],
            island: &[
                ("verb", "said"),
                ("comp", "whether"),
                ("clause", "they {verb}"),
                ("pronoun", "PRONOUN"),
                ("rest", "{object}"),
            ],
        },
    );
    b.slot(
        "verb",
        cycle(&["insulted", "praised", "visited", "criticized", "ignored", "thanked"], GENDER_N, 0),
    );
    b.slot(
        "object",
        cycle(&["friends", "students", "cousins", "neighbors", "colleagues"], GENDER_N, 0),
    );
    b.build()
}

fn gender_adjunct_island() -> Template {
    let mut b = gender_suite(
        "gender_adjunct_island",
        "gender expectation through an adjunct island",
        GenderFrame {
            control: &[
                ("frame", "thinks"),
                ("clause", "they {verb}"),
                ("pronoun", "PRONOUN"),
                ("rest", "{object}"),
            ],
            island: &[
                ("frame", "got mad after"),
                ("clause", "they {verb}"),
                ("pronoun", "PRONOUN"),
                ("rest", "{object}"),
            ],
        },
    );
    b.slot(
        "verb",
        cycle(&["insulted", "criticized", "mocked", "ignored", "questioned"], GENDER_N, 0),
    );
    b.slot(
        "object",
        cycle(&["performance", "speech", "cooking", "singing", "work", "plan"], GENDER_N, 0),
    );
    b.build()
}

fn gender_complex_np_island() -> Template {
    let mut b = gender_suite(
        "gender_complex_np_island",
        "gender expectation through a complex NP island",
        GenderFrame {
            control: &[
                ("clause", "said they saw"),
                ("relative", ""),
                ("pronoun", "PRONOUN"),
                ("rest", "{object}"),
            ],
            island: &[
                ("clause", "said they saw"),
                ("relative", "the {head} that featured"),
                ("pronoun", "PRONOUN"),
                ("rest", "{object}"),
            ],
        },
    );
    b.slot(
        "head",
        cycle(&["exhibit", "film", "show", "documentary", "article"], GENDER_N, 0),
    );
    b.slot(
        "object",
        cycle(&["performance", "paintings", "photos", "garden", "house", "work"], GENDER_N, 0),
    );
    b.build()
}

fn gender_coordination_island() -> Template {
    let mut b = gender_suite(
        "gender_coordination_island",
        "gender expectation through a coordination island",
        GenderFrame {
            control: &[
                ("clause", "knows they talked about"),
                ("conjunct", ""),
                ("pronoun", "PRONOUN"),
                ("rest", "{object}"),
            ],
            island: &[
                ("clause", "knows they talked about"),
                ("conjunct", "the {topic} and"),
                ("pronoun", "PRONOUN"),
                ("rest", "{object}"),
            ],
        },
    );
    b.slot(
        "topic",
        cycle(&["football game", "weather", "election", "new movie", "traffic"], GENDER_N, 0),
    );
    b.slot(
        "object",
        cycle(&["performance", "job", "car", "family", "vacation", "health"], GENDER_N, 0),
    );
    b.build()
}

fn gender_subject_island() -> Template {
    let mut b = gender_suite(
        "gender_subject_island",
        "gender expectation through a subject island",
        GenderFrame {
            control: &[
                ("clause", "said they sold the {thing} by"),
                ("pronoun", "PRONOUN"),
                ("rest", "friend"),
                ("tail", ""),
            ],
            island: &[
                ("clause", "said the {thing} by"),
                ("pronoun", "PRONOUN"),
                ("rest", "friend"),
                ("tail", "sold for a lot of money"),
            ],
        },
    );
    b.slot(
        "thing",
        cycle(&["painting", "sculpture", "photograph", "drawing", "novel"], GENDER_N, 0),
    );
    b.build()
}

fn gender_sentential_subject_island() -> Template {
    let mut b = gender_suite(
        "gender_sentential_subject_island",
        "gender expectation through a sentential subject island",
        GenderFrame {
            control: &[
                ("clause", "knows they will {verb}"),
                ("pronoun", "PRONOUN"),
                ("rest", "{object}"),
                ("tail", ""),
            ],
            island: &[
                ("clause", "knows for them to {verb}"),
                ("pronoun", "PRONOUN"),
                ("rest", "{object}"),
                ("tail", "will be {adjective}"),
            ],
        },
    );
    b.slot(
        "verb",
        cycle(&["save", "help", "visit", "find", "call"], GENDER_N, 0),
    );
    b.slot(
        "object",
        cycle(&["friend", "brother", "sister", "neighbor", "daughter", "son"], GENDER_N, 0),
    );
    b.slot(
        "adjective",
        cycle(&["difficult", "easy", "important", "impossible"], GENDER_N, 0),
    );
    b.build()
}

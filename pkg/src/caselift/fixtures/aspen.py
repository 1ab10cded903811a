"""The ASPEN case: a deterministic 40-revision repository replay.

The replay follows the published trace of the ASPEN education service:
4 elements at revision 1 growing to 134 at revision 40, a development
review in which the operator records 9 rebuttals against the developer's
claims (revisions 13-19, agreed at 22), and an operation review closed two
revisions after it opened.  Milestone revisions: #2 initial requirement,
#12 development, #22 development agreement, #27 service design,
#29 service agreement, #35 failure recovery, #40 service evolution.

Only those endpoint values are pinned; every intermediate element text and
per-revision count in between is synthetic, written to stay plausible for
an online programming-exercise service.  Timestamps are fixed so replays
are hash-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

from caselift.core import (
    Document,
    Element,
    PREFIX_KIND,
    RebuttalStatus,
    Role,
    Stage,
    StakeholderId,
)
from caselift.store import Repository
from caselift.workflow import (
    ReviewLog,
    close_review,
    open_review,
    record_resolution,
    resolve_rebuttal,
)

DOCUMENT_ID = "aspen"
DEVELOPMENT_REVIEW = "Development Agreement"
OPERATION_REVIEW = "Service Agreement"

STAKEHOLDERS = [
    StakeholderId("owner", Role.Owner),
    StakeholderId("developer", Role.Developer),
    StakeholderId("operator", Role.Operator),
    StakeholderId("user", Role.User),
]

_EPOCH = datetime(2013, 4, 8, 10, 0, tzinfo=timezone.utc)


@dataclass
class _Add:
    id: str
    parent: str
    text: str
    author: str | None = None
    stage: Stage | None = None
    rebuttal: bool = False
    meta: dict[str, str] = field(default_factory=dict)


@dataclass
class _Step:
    author: str
    message: str
    day: int
    adds: list[_Add] = field(default_factory=list)
    edits: list[tuple[str, str]] = field(default_factory=list)  # (id, new text)
    resolves: list[tuple[str, RebuttalStatus, str, str]] = field(default_factory=list)
    open_review: tuple[str, Stage, tuple[str, ...]] | None = None
    close_review: str | None = None


def _n(eid, parent, text, author=None, stage=None, rebuttal=False, meta=None):
    return _Add(eid, parent, text, author, stage, rebuttal, meta or {})


_ALL = ("owner", "developer", "operator", "user")


def _steps() -> list[_Step]:
    rr = RebuttalStatus.ResidualRisk
    fixed = RebuttalStatus.Fixed
    withdrawn = RebuttalStatus.Withdrawn
    return [
        _Step("owner", "Top goal with shared assumptions", 0, adds=[
            _n("G1", "", "The ASPEN online education service delivers correct exercise services to its users"),
            _n("C1.1", "G1", "Assumption: 100 students submit assignments from home computers"),
            _n("C1.2", "G1", "Assumption: at most 5 students access the service at the same time"),
            _n("S1", "G1", "Argue over the lifecycle stages"),
        ]),
        _Step("owner", "Initial requirement: stage goals", 7, adds=[
            _n("G2", "S1", "Requirements and architecture fit the expected classroom use", stage=Stage.Planning),
            _n("G3", "S1", "The developed system meets the owner's dependability goals", stage=Stage.Development),
            _n("G4", "S1", "The operated service meets the owner's dependability goals", stage=Stage.Operation),
            _n("G5", "S1", "System changes are accommodated without losing dependability", stage=Stage.Evolution),
        ]),
        _Step("owner", "Plan the requirement elicitation", 14, adds=[
            _n("C2.1", "G2", "Scope: the first service year with three participating classes"),
            _n("S2.1", "G2", "Argue requirements and architecture separately"),
            _n("G13", "S2.1", "Dependability requirements are elicited from the instructors"),
            _n("G14", "S2.1", "The architecture suits the expected scale"),
        ]),
        _Step("owner", "Planning evidence collected", 21, adds=[
            _n("E13.1", "G13", "Requirement workshop minutes with the instructors"),
            _n("E13.2", "G13", "Instructor sign-off on the requirement list", author="user"),
            _n("E14.1", "G14", "Architecture review record", author="developer"),
            _n("C14.2", "G14", "The service is sized for the submission deadline peak"),
            _n("G41", "S2.1", "Responsibilities are assigned for every lifecycle stage"),
            _n("E41.1", "G41", "Contract annex naming the development and operation firms"),
        ]),
        _Step("developer", "Development argument: dependability attributes", 28, adds=[
            _n("S3.1", "G3", "Argue over the dependability attributes"),
            _n("C3.1", "G3", "The development firm follows its standard coding and testing process"),
            _n("G6", "S3.1", "The ASPEN service is available to the students"),
            _n("G7", "S3.1", "No hardware or software failure interrupts the service"),
            _n("G8", "S3.1", "Data entrusted to ASPEN is never lost or corrupted"),
            _n("G9", "S3.1", "Personal information is not disclosed to unauthorized parties"),
        ]),
        _Step("developer", "Availability argument", 35, adds=[
            _n("C6.1", "G6", "Availability is judged during scheduled class hours"),
            _n("S6.1", "G6", "Argue availability under normal and peak load"),
            _n("G15", "S6.1", "The service responds within two seconds under normal classroom load"),
            _n("G16", "S6.1", "The service stays responsive at the submission deadline peak"),
        ]),
        _Step("developer", "Availability evidence", 42, adds=[
            _n("E15.1", "G15", "Response time report from functional tests"),
            _n("E16.1", "G16", "External experience reports on web server scaling collected from the Internet"),
            _n("G42", "S6.1", "The service recovers from restarts within five minutes"),
            _n("E42.1", "G42", "Deployment runbook with a timed restart rehearsal"),
        ]),
        _Step("developer", "Reliability argument", 49, adds=[
            _n("C7.1", "G7", "Commodity server hardware is assumed"),
            _n("S7.1", "G7", "Argue over component failures"),
            _n("G17", "S7.1", "Application crashes are contained and restarted"),
            _n("G18", "S7.1", "The runtime environment is kept stable"),
        ]),
        _Step("developer", "Reliability evidence", 56, adds=[
            _n("E17.1", "G17", "Supervisor restart configuration and its test log"),
            _n("E18.1", "G18", "External experience reports on the chosen runtime stack"),
            _n("G43", "S7.1", "Failures of the exercise runner do not corrupt submissions"),
            _n("E43.1", "G43", "Runner sandbox test results"),
        ]),
        _Step("developer", "Integrity argument: storage types", 63, adds=[
            _n("C8.1", "G8", "Data kinds: submitted programs and activity logs"),
            _n("S8.2", "G8", "Arguing over the type of data storage"),
            _n("G22", "S8.2", "The submitted program data by the students is never lost"),
            _n("G23", "S8.2", "The student activity data is never lost"),
        ]),
        _Step("developer", "Integrity evidence", 70, adds=[
            _n("E22.1", "G22", "The program data is stored in the git repository"),
            _n("E23.1", "G23", "The student activity is stored on the syslog storage and the storing path is tested"),
            _n("G44", "S8.2", "Grading records match the submitted programs"),
            _n("E44.1", "G44", "Cross-check script comparing the grade book and the repository"),
        ]),
        _Step("developer", "Privacy argument; development claims ready for review", 77, adds=[
            _n("C9.1", "G9", "Personal data: names, student identifiers, submission records"),
            _n("S9.1", "G9", "Argue access control and data handling"),
            _n("G19", "S9.1", "Only authenticated users reach student data"),
            _n("E19.1", "G19", "Access control matrix and login tests"),
            _n("G45", "S9.1", "Backups and logs do not leak personal data"),
            _n("E45.1", "G45", "Log scrubbing configuration review"),
        ], open_review=(DEVELOPMENT_REVIEW, Stage.Development, _ALL)),
        _Step("operator", "Review: data backup risk", 79, adds=[
            _n("C22.2", "E22.1", "Lack of data backups", rebuttal=True),
        ]),
        _Step("operator", "Review: availability evidence", 81, adds=[
            _n("C6.2", "G6", "No load test was run on the actual servers", rebuttal=True),
            _n("C16.2", "E16.1", "External reports do not demonstrate this deployment", rebuttal=True),
        ]),
        _Step("operator", "Review: deadline peak", 83, adds=[
            _n("C15.2", "E15.1", "Functional tests do not cover the non-functional claims", rebuttal=True),
        ]),
        _Step("operator", "Review: reliability drills", 85, adds=[
            _n("C17.2", "E17.1", "The restart drill was run only once", rebuttal=True),
            _n("C18.2", "E18.1", "The runtime stack version is not pinned", rebuttal=True),
        ]),
        _Step("operator", "Review: session handling", 87, adds=[
            _n("C19.2", "E19.1", "Login tests do not cover session expiry", rebuttal=True),
        ]),
        _Step("operator", "Review: single point of failure", 89, adds=[
            _n("C7.2", "G7", "A single application server is a single point of failure", rebuttal=True),
        ]),
        _Step("operator", "Review: activity data retention", 91, adds=[
            _n("C23.2", "E23.1", "Syslog rotation may silently drop records", rebuttal=True),
        ]),
        _Step("developer", "Address review findings: load and restart evidence", 95, adds=[
            _n("E6.3", "G6", "Load test log from the production servers at five simultaneous users"),
            _n("E19.2", "G19", "Session expiry covered by the extended login test suite"),
        ], edits=[
            ("E15.1", "Load test report at five simultaneous users on the staging servers"),
            ("E17.1", "Supervisor restart configuration; restart exercised in three failover drills"),
        ]),
        _Step("developer", "Address review findings: pinning and log rotation", 98, edits=[
            ("E18.1", "Runtime stack pinned in the deployment manifests; provisioning rehearsed"),
            ("E23.1", "The student activity is stored on the syslog storage with archive rotation; the storing path is tested"),
        ]),
        _Step("owner", "Development agreement", 101, resolves=[
            ("C22.2", rr, "operator", "Mitigated by periodical backups at the operation stage"),
            ("C6.2", fixed, "operator", "Production load test supplied"),
            ("C16.2", rr, "operator", "Scaling behaviour to be re-examined during operation"),
            ("C15.2", fixed, "operator", "Staging load test replaces the functional-test report"),
            ("C17.2", fixed, "operator", "Failover drill repeated three times"),
            ("C18.2", fixed, "operator", "Stack versions pinned in the manifests"),
            ("C19.2", withdrawn, "operator", "Session expiry test demonstrated during the meeting"),
            ("C7.2", rr, "operator", "Accepted for the first service year; watched at operation"),
            ("C23.2", fixed, "operator", "Archive rotation configured and tested"),
        ], close_review=DEVELOPMENT_REVIEW),
        _Step("operator", "Service design: failure avoidance argument", 115, adds=[
            _n("C4.1", "G4", "Operation scope: scheduled classes and the submission deadline"),
            _n("S4.1", "G4", "Argue failure avoidance for each identified failure mode"),
            _n("G24", "S4.1", "A traffic spike beyond the assumption does not stop the service"),
            _n("S24.1", "G24", "Argue detection and mitigation of the traffic spike"),
            _n("G25", "S24.1", "Network traffic over the assumption is detectable"),
            _n("G28", "S24.1", "A detected traffic spike is throttled before the service stops"),
        ]),
        _Step("operator", "Traffic monitoring and throttling", 122, adds=[
            _n("C25.1", "G25", "The number of the assumed users is 5 at the same time"),
            _n("E25.3", "G25", "Zabbix integrated monitoring tool is installed"),
            _n("E28.1", "G28", "Throttle script for the web tier", meta={"x-throttle-limit": "5r/s"}),
            _n("G30", "S4.1", "CPU overload does not stop the service"),
            _n("S30.1", "G30", "Argue detection and mitigation of CPU overload"),
            _n("G26", "S30.1", "CPU overload is detectable"),
        ]),
        _Step("operator", "CPU overload detection and shedding", 129, adds=[
            _n("C26.1", "G26", "CPU overload is defined by a threshold w > 10"),
            _n("E26.2", "G26", "The CPU load average is monitored"),
            _n("G32", "S30.1", "Detected CPU overload is relieved before the service stops"),
            _n("E32.1", "G32", "Run queue shedding script", meta={"x-shed-threshold": "w > 10"}),
            _n("G31", "S4.1", "Data loss does not go unnoticed until grading"),
            _n("S31.1", "G31", "Argue detection and recovery of data loss"),
        ]),
        _Step("operator", "Data loss detection and recovery", 136, adds=[
            _n("G27", "S31.1", "Data loss is detectable"),
            _n("G33", "S31.1", "Detected data loss is recovered from the git history before grading"),
            _n("E33.1", "G33", "Recovery procedure rehearsed on the staging copy"),
            _n("C31.1", "G31", "Data loss here means submissions missing from the repository"),
            _n("G46", "S4.1", "Periodic backups of the program data are taken during operation"),
            _n("E46.1", "G46", "Backup cron configuration and restore drill log"),
        ]),
        _Step("operator", "Service design complete", 143, adds=[
            _n("C4.2", "G4", "Operation scripts run under the operator's account"),
            _n("E28.2", "G28", "Throttle rehearsal at the submission deadline"),
            _n("C46.2", "G46", "Backup cycle: nightly, kept for the term"),
        ], open_review=(OPERATION_REVIEW, Stage.Operation, _ALL)),
        _Step("user", "Operation review: help desk support", 150, adds=[
            _n("G34", "S4.1", "Service troubles are reported and handled through a help desk"),
            _n("E34.1", "G34", "Help desk rota and contact page", author="operator"),
        ]),
        _Step("owner", "Service agreement", 157, adds=[
            _n("C4.3", "G4", "Agreement: the help desk answers within one working day"),
        ], close_review=OPERATION_REVIEW),
        _Step("operator", "Operation log: first classes", 171, adds=[
            _n("E25.4", "G25", "Monitoring dashboards reviewed after every class"),
            _n("C34.2", "G34", "Help desk hours: weekday afternoons"),
            _n("E42.2", "G42", "Restart rehearsal repeated with the operation firm"),
        ]),
        _Step("operator", "Operation log: deadline rehearsal", 185, adds=[
            _n("E46.3", "G46", "First restore drill log"),
            _n("C28.3", "G28", "Throttle threshold reviewed monthly"),
            _n("E26.3", "G26", "Alert rule log: CPU threshold tuned after the first week"),
        ]),
        _Step("developer", "Maintenance release", 199, adds=[
            _n("E17.2", "G17", "Crash-restart drill repeated after the maintenance release"),
            _n("E18.2", "G18", "Dependency audit after the maintenance release"),
            _n("C3.2", "G3", "Maintenance releases follow the agreed change window"),
        ]),
        _Step("operator", "Monitoring coverage widened", 213, adds=[
            _n("C26.4", "G26", "Threshold history kept in the operations journal"),
            _n("E34.2", "G34", "Help desk ticket summary for the first month"),
            _n("E44.2", "G44", "Grade book cross-check run after every class"),
        ]),
        _Step("user", "Classroom feedback recorded", 227, adds=[
            _n("C1.3", "G1", "Assumption review: whole classes may access from the university network at once"),
            _n("E15.3", "G15", "Response times observed from the classroom network", author="operator"),
            _n("C16.3", "G16", "Classroom access concentrates on the same minute"),
        ]),
        _Step("operator", "Failure recovery: classroom overload", 241, adds=[
            _n("C25.2", "G25", "Exceeding the assumption", rebuttal=True),
            _n("G35", "S4.1", "The servers scale out to the classroom access density"),
            _n("E35.1", "G35", "Capacity increase order and the classroom load test at 40 users"),
            _n("C35.2", "G35", "Scale-out is provisioned per classroom schedule"),
            _n("G47", "S4.1", "The classroom access pattern is reflected in the assumptions", author="owner"),
            _n("E47.1", "G47", "Measured traffic density from the failure post-mortem"),
        ], edits=[
            ("C1.2", "Assumption revised: a full classroom of 40 students may access simultaneously"),
        ]),
        _Step("owner", "Evolution argument opened", 380, adds=[
            _n("C5.1", "G5", "Evolution window: the second service year"),
            _n("S5.1", "G5", "Argue evolution from observed failures and demands"),
            _n("G36", "S5.1", "Adopting a maintained open-source platform reduces the in-house failure surface"),
            _n("C36.1", "G36", "Candidate platforms: Moodle and in-house continuation"),
        ]),
        _Step("developer", "Evolution: platform evaluation", 394, adds=[
            _n("E36.2", "G36", "Moodle evaluation report against the exercise workflows"),
            _n("G37", "S5.1", "Moving to a cloud platform removes the fixed capacity limit", author="operator"),
            _n("E37.1", "G37", "Cloud sizing worksheet from the classroom traffic measurements", author="operator"),
            _n("C37.2", "G37", "Target: a standard public cloud platform", author="operator"),
        ]),
        _Step("operator", "Evolution: migration rehearsal", 408, adds=[
            _n("E37.3", "G37", "Migration rehearsal log on the cloud staging environment"),
            _n("G48", "S5.1", "Student data survives the platform migration"),
            _n("E48.1", "G48", "Dry-run export and import of the repository data"),
            _n("C48.2", "G48", "Migration happens between terms"),
        ]),
        _Step("user", "Evolution: usability demand", 422, adds=[
            _n("G38", "S5.1", "The evolved service keeps the classroom workflow usable"),
            _n("E38.1", "G38", "Instructor survey after the first year"),
            _n("C38.2", "G38", "Usability judged by the instructors of the participating classes"),
        ]),
        _Step("owner", "Service evolution recorded", 436, adds=[
            _n("C5.2", "G5", "Evolution decisions recorded: open-source adoption and cloud transition"),
            _n("E36.3", "G36", "Decision minutes: adopt the open-source platform"),
            _n("E37.4", "G37", "Decision minutes: transition to the cloud platform"),
        ]),
    ]


def build_aspen_repository(path: str | Path, upto: int = 40) -> tuple[Repository, ReviewLog]:
    """Replay the ASPEN history into a fresh repository directory.

    ``upto`` truncates the replay; 21 gives the state with all nine
    development rebuttals still open, which the review tests and the UI
    walkthrough start from.
    """
    steps = _steps()
    if not 1 <= upto <= len(steps):
        raise ValueError(f"upto must be within 1..{len(steps)}")
    repo = Repository.init(path, DOCUMENT_ID, STAKEHOLDERS)
    log = ReviewLog.load(repo.path)
    doc: Document | None = None

    for step in steps[:upto]:
        base = repo.head
        resolutions = []
        for add in step.adds:
            element = Element(
                id=add.id,
                kind=PREFIX_KIND[add.id[0]],
                text=add.text,
                author=add.author or step.author,
                stage=add.stage,
                is_rebuttal=add.rebuttal,
                metadata=dict(add.meta),
            )
            if add.parent == "":
                doc = Document(element.id, {element.id: element}, {})
            else:
                assert doc is not None
                doc = doc.with_child(add.parent, element)
        for eid, new_text in step.edits:
            doc = doc.with_element(doc.element(eid).replace(text=new_text))
        for rid, decision, decided_by, note in step.resolves:
            doc, resolution = resolve_rebuttal(repo, doc, rid, decision, decided_by, note)
            resolutions.append(resolution)
        repo.commit(doc, step.author, step.message, base, timestamp=_EPOCH + timedelta(days=step.day))
        for resolution in resolutions:
            record_resolution(repo, log, resolution)
        if step.open_review is not None:
            name, phase, participants = step.open_review
            open_review(repo, log, name, phase, participants)
        if step.close_review is not None:
            close_review(repo, log, step.close_review, repo.head)
    return repo, log


def fig8_fragment(author: str = "operator") -> Document:
    """The traffic-detection fragment: a goal, two contexts (one a rebuttal)
    and one evidence, as used by the render and validation examples."""
    g25 = Element(id="G25", kind=PREFIX_KIND["G"],
                  text="Network traffic over the assumption is detectable", author=author)
    doc = Document("G25", {"G25": g25}, {})
    doc = doc.with_child("G25", Element(
        id="C25.1", kind=PREFIX_KIND["C"],
        text="The number of the assumed users is 5 at the same time", author=author))
    doc = doc.with_child("G25", Element(
        id="C25.2", kind=PREFIX_KIND["C"], text="Exceeding the assumption",
        author=author, is_rebuttal=True))
    doc = doc.with_child("G25", Element(
        id="E25.3", kind=PREFIX_KIND["E"],
        text="Zabbix integrated monitoring tool is installed", author=author))
    return doc


def fig6_fragment() -> Document:
    """The data-storage fragment with the operator's backup rebuttal."""
    g22 = Element(id="G22", kind=PREFIX_KIND["G"],
                  text="The submitted program data by the students is never lost",
                  author="developer")
    doc = Document("G22", {"G22": g22}, {})
    doc = doc.with_child("G22", Element(
        id="E22.1", kind=PREFIX_KIND["E"],
        text="The program data is stored in the git repository", author="developer"))
    doc = doc.with_child("E22.1", Element(
        id="C22.2", kind=PREFIX_KIND["C"], text="Lack of data backups",
        author="operator", is_rebuttal=True))
    return doc

#!/usr/bin/env python3
"""Regenerates the bundled sample data. Output is deterministic."""

import csv
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent

TOPICS = {
    "commute": [
        "I used to spend almost two hours a day on the train",
        "not having to commute gave me back my mornings",
        "the commute was the only time I had to read",
        "I do miss the walk to the station sometimes",
    ],
    "boundaries": [
        "my kitchen table became my office and I never really leave work",
        "I close the laptop at six but the notifications keep coming",
        "it is hard to switch off when the office is in your bedroom",
        "I set up a separate room so I can shut the door at the end of the day",
    ],
    "isolation": [
        "some weeks I barely talk to anyone outside of video calls",
        "I feel lonely on the days when nobody is online",
        "the small talk by the coffee machine is what I miss most",
        "working alone all day made me feel disconnected from the team",
    ],
    "meetings": [
        "we have far more video meetings than we ever had in person",
        "back to back calls leave no time to actually do the work",
        "camera fatigue is real after the fourth meeting of the day",
        "shorter meetings with a clear agenda helped our team a lot",
    ],
    "flexibility": [
        "I can pick up my kids from school and finish later in the evening",
        "flexible hours let me work when I concentrate best",
        "being able to run errands at lunch makes a huge difference",
        "I like that I can structure the day around my own energy",
    ],
    "productivity": [
        "I get more focused work done at home without interruptions",
        "my productivity dropped because the house is full of distractions",
        "I finish reports faster when nobody stops by my desk",
        "measuring output instead of hours changed how we think about productivity",
    ],
    "equipment": [
        "the company paid for a proper chair and a second monitor",
        "my internet connection drops whenever everyone at home is streaming",
        "I had to buy my own headset because the laptop microphone was terrible",
        "a good desk setup took months to get right",
    ],
    "management": [
        "my manager checks in every morning which feels like surveillance",
        "trust from my manager is the reason remote work works for me",
        "new managers struggle to lead people they have never met",
        "clear goals from leadership matter more than where we sit",
    ],
    "onboarding": [
        "joining a new team remotely was confusing for the first months",
        "onboarding over video meant I never learned the unwritten rules",
        "a buddy system helped new hires settle in",
        "the juniors learn less because they cannot overhear how seniors solve problems",
    ],
    "wellbeing": [
        "I walk every day at lunch and my health has improved",
        "my back hurts from sitting on the sofa with a laptop",
        "stress went down once I stopped rushing for the train",
        "burnout crept up on me because the days had no clear end",
    ],
    "collaboration": [
        "shared documents made collaboration easier across time zones",
        "brainstorming is harder when everyone is a small square on a screen",
        "we use chat channels constantly to keep collaboration going",
        "whiteboard sessions in the office were more creative",
    ],
    "hybrid": [
        "two office days a week feels like the right balance",
        "hybrid meetings are awkward when half the room is remote",
        "I go to the office only when my team is there",
        "the office is for people and home is for focused tasks",
    ],
    "costs": [
        "I save money on lunches and train tickets",
        "my heating and electricity bills went up in winter",
        "the savings on fuel paid for my new desk",
        "nobody reimburses the extra cost of working from home",
    ],
    "career": [
        "I worry that being invisible at home will slow my promotion",
        "remote roles let me apply for jobs in other cities",
        "people in the office get noticed more by senior staff",
        "my career moved faster because I could take a job abroad",
    ],
}

OPENERS = ["", "Honestly, ", "For me, ", "I think ", "To be fair, ", "Yeah, ", "Well, ",
           "In my experience, ", "Personally, ", "I would say "]
CLOSERS = [".", ".", ".", ", and that surprised me.", ", at least most of the time.",
           ", which I did not expect.", ", to be honest.", " and I think a lot of people feel the same."]
FILLERS = [
    "It took a while to get used to.",
    "That is probably the biggest change for me.",
    "I talked to my partner about it a lot.",
    "Other people on my team said something similar.",
    "It really depends on the week.",
    "I am still figuring out what works.",
]
QUESTIONS = [
    "How has your daily routine changed since you started working remotely?",
    "What do you miss most about the office?",
    "Can you say more about that?",
    "How do you separate work from home life?",
    "What has your manager done that helped or did not help?",
    "How do meetings work for your team now?",
    "What would make remote work better for you?",
    "Does anyone else want to respond to that?",
    "How did onboarding go for people who joined recently?",
    "What about costs, has anything changed there?",
    "Thank you, that is really helpful.",
    "Let us move on to the next topic.",
]

PARTICIPANTS = ["P1", "P2", "P3", "P4", "P5", "P6", "P7", "P8"]


def sentence(rng, topic=None):
    topic = topic or rng.choice(list(TOPICS))
    core = rng.choice(TOPICS[topic])
    opener = rng.choice(OPENERS)
    if opener and opener != "I think " and opener != "I would say ":
        core = core[0].lower() + core[1:] if not core.startswith("I ") else core
    text = opener + core + rng.choice(CLOSERS)
    return text[0].upper() + text[1:], topic


def turn(rng, n_sentences):
    parts = []
    topic = None
    for i in range(n_sentences):
        if i and rng.random() < 0.25:
            parts.append(rng.choice(FILLERS))
            continue
        if topic is None or rng.random() < 0.4:
            topic = rng.choice(list(TOPICS))
        s, topic = sentence(rng, topic)
        parts.append(s)
    return " ".join(parts)


def focus_group():
    rng = random.Random(20240515)
    rows = []
    target_words = 9300
    long_slots = {60, 190}
    medium_slots = {25, 90, 130, 170, 220, 260}
    i = 0
    words = 0
    while words < target_words:
        if i % 9 == 0:
            speaker, text = "Moderator", rng.choice(QUESTIONS)
        elif i in long_slots:
            speaker, text = rng.choice(PARTICIPANTS), turn(rng, 24)
        elif i in medium_slots:
            speaker, text = rng.choice(PARTICIPANTS), turn(rng, 9)
        else:
            speaker, text = rng.choice(PARTICIPANTS), turn(rng, rng.choice([1, 2, 2, 3]))
        rows.append((speaker, text))
        words += len(text.split())
        i += 1
    with open(HERE / "sample_focus_group.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["speaker", "text"])
        w.writerows(rows)
    return words, len(rows)


LABELS = [
    ("Long commute", "Time or stress spent travelling to work"),
    ("Morning routine", "Changes to how the day starts"),
    ("Reading time", "Time for reading or personal activities"),
    ("Office desk", "Physical workspace at the employer"),
    ("Kitchen table", "Working from improvised spaces at home"),
    ("Notifications", "Messages arriving outside working hours"),
    ("Bedroom office", "Sleeping and working in the same room"),
    ("Separate room", "A dedicated room for work"),
    ("Video calls", "Meetings held over video"),
    ("Feeling lonely", "Loneliness or lack of contact"),
    ("Coffee machine", "Informal chats at the office"),
    ("Disconnected team", "Feeling apart from colleagues"),
    ("Back to back", "Meetings without breaks"),
    ("Camera fatigue", "Tiredness from being on camera"),
    ("Clear agenda", "Structured, shorter meetings"),
    ("School pickup", "Fitting work around children"),
    ("Flexible hours", "Choosing when to work"),
    ("Running errands", "Personal tasks during the day"),
    ("Own energy", "Working to personal rhythms"),
    ("Focused work", "Deep work without interruptions"),
    ("Distractions", "Household interruptions"),
    ("Reports faster", "Finishing tasks more quickly"),
    ("Measuring output", "Judging results rather than hours"),
    ("Proper chair", "Employer-provided furniture"),
    ("Internet connection", "Connectivity problems"),
    ("Headset", "Audio equipment"),
    ("Desk setup", "Arranging a home workstation"),
    ("Surveillance", "Feeling monitored by management"),
    ("Trust", "Managers trusting employees"),
    ("New managers", "Leading people never met in person"),
    ("Clear goals", "Direction from leadership"),
    ("Confusing start", "Difficult first months in a new team"),
    ("Unwritten rules", "Tacit norms that are hard to learn remotely"),
    ("Buddy system", "Peer support for new hires"),
    ("Juniors learn", "Learning by overhearing senior colleagues"),
    ("Walk every day", "Exercise during the working day"),
    ("Back pain", "Physical discomfort from poor setups"),
    ("Stress went down", "Reduced stress"),
    ("Burnout", "Exhaustion from days without an end"),
    ("Shared documents", "Collaborative editing tools"),
    ("Brainstorming", "Creative group work"),
    ("Chat channels", "Text-based team communication"),
    ("Whiteboard sessions", "In-person creative sessions"),
    ("Office days", "Number of days in the office"),
    ("Hybrid meetings", "Meetings mixing remote and in-room people"),
    ("Team is there", "Going in when colleagues are present"),
    ("Save money", "Savings from not commuting"),
    ("Bills went up", "Higher household costs"),
    ("Reimburses", "Employer compensation of costs"),
    ("Promotion", "Worries about career progression"),
    ("Other cities", "Access to jobs elsewhere"),
    ("Get noticed", "Visibility to senior staff"),
]


def codebook():
    rows = [(0, "Irrelevant", "Not related to working from home")]
    for i, (name, definition) in enumerate(LABELS, start=1):
        rows.append((i, name, definition))
    rows.append((len(LABELS) + 1, "Other relevant", "Relevant but not covered by another label"))
    with open(HERE / "codebook_54.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["id", "name", "definition"])
        w.writerows(rows)
    return rows


IRRELEVANT = [
    "Anyone watching the match tonight?",
    "Just had the best pizza of my life.",
    "Happy birthday to my little sister!",
    "The weather is lovely today.",
    "New phone arrived, so happy.",
]


def social_posts(labels):
    rng = random.Random(7)
    posts = []
    for _ in range(200):
        r = rng.random()
        if r < 0.12:
            posts.append(rng.choice(IRRELEVANT))
        else:
            topic = rng.choice(list(TOPICS))
            s, _ = sentence(rng, topic)
            posts.append(s + (" #wfh" if rng.random() < 0.3 else ""))
    with open(HERE / "social_posts_200.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["id", "text"])
        for i, p in enumerate(posts):
            w.writerow([i + 1, p])
    # Prior examples: 50 posts coded by keyword, as a hand coder might.
    prior_rng = random.Random(11)
    picked = prior_rng.sample(range(len(posts)), 50)
    with open(HERE / "prior_examples_50.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["text", "code"])
        for i in picked:
            text = posts[i]
            low = text.lower()
            code = labels[-1][0]
            if text in IRRELEVANT:
                code = 0
            else:
                for lid, name, _ in labels[1:-1]:
                    if name.lower() in low:
                        code = lid
                        break
            w.writerow([text, code])


def main():
    words, n = focus_group()
    labels = codebook()
    social_posts(labels)
    print(f"focus group: {n} entries, {words} words; codebook: {len(labels)} labels")


if __name__ == "__main__":
    main()

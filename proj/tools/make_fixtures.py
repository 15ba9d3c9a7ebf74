#!/usr/bin/env python3
"""Regenerates the synthetic contest fixtures in data/.

Both files are simulated from a Bradley-Terry model with a fixed seed. In
each, exactly one team loses every game it plays and the results among the
remaining teams are strongly connected, so maximum likelihood diverges only
through the winless team.
"""

import csv
import math
import pathlib
import random

import networkx as nx

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"

NBA_TEAMS = [
    "Atlanta Hawks", "Boston Celtics", "Brooklyn Nets", "Charlotte Hornets",
    "Chicago Bulls", "Cleveland Cavaliers", "Dallas Mavericks", "Denver Nuggets",
    "Detroit Pistons", "Golden State Warriors", "Houston Rockets", "Indiana Pacers",
    "Los Angeles Clippers", "Los Angeles Lakers", "Memphis Grizzlies", "Miami Heat",
    "Milwaukee Bucks", "Minnesota Timberwolves", "New Orleans Pelicans",
    "New York Knicks", "Oklahoma City Thunder", "Orlando Magic",
    "Philadelphia 76ers", "Phoenix Suns", "Portland Trail Blazers",
    "Sacramento Kings", "San Antonio Spurs", "Toronto Raptors", "Utah Jazz",
    "Washington Wizards",
]


def strongly_connected(games, teams):
    g = nx.DiGraph()
    g.add_nodes_from(teams)
    g.add_edges_from((loser, winner) for winner, loser in games)
    return nx.is_strongly_connected(g)


def play(rng, a, b, ability):
    p = 1.0 / (1.0 + math.exp(ability[b] - ability[a]))
    return (a, b) if rng.random() < p else (b, a)


def season(seed, teams, winless, winless_games, other_games):
    rng = random.Random(seed)
    others = [t for t in teams if t != winless]
    while True:
        ability = {t: rng.gauss(0.0, 0.6) for t in others}
        games = []
        for _ in range(winless_games):
            games.append((rng.choice(others), winless))
        for _ in range(other_games):
            a, b = rng.sample(others, 2)
            games.append(play(rng, a, b, ability))
        if strongly_connected([g for g in games if winless not in g], others):
            rng.shuffle(games)
            return games


def round_robin(seed, teams, winless):
    rng = random.Random(seed)
    others = [t for t in teams if t != winless]
    while True:
        ability = {t: rng.gauss(0.0, 0.5) for t in others}
        games = []
        for i, a in enumerate(others):
            for b in others[i + 1:]:
                games.append(play(rng, a, b, ability))
                games.append(play(rng, b, a, ability))
        if strongly_connected(games, others):
            games += [(t, winless) for t in others]
            rng.shuffle(games)
            return games


def write(name, games):
    with open(DATA / name, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["winner", "loser"])
        w.writerows(games)


if __name__ == "__main__":
    write("nba_synthetic.csv", season(2014, NBA_TEAMS, "Philadelphia 76ers", 17, 245))
    teams = ["Anchors", "Bisons", "Comets", "Drakes", "Eagles", "Falcons", "Gulls", "Hatters"]
    write("tournament8.csv", round_robin(8, teams, "Hatters"))

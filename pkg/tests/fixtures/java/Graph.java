package org.example.graph;

import java.util.*;

public class Graph<V> {

    private final Map<V, Set<V>> adjacency = new LinkedHashMap<>();

    public void addEdge(V from, V to) {
        adjacency.computeIfAbsent(from, k -> new LinkedHashSet<>()).add(to);
        adjacency.computeIfAbsent(to, k -> new LinkedHashSet<>());
    }

    public List<V> topologicalOrder() {
        Map<V, Integer> indegree = new HashMap<>();
        for (V v : adjacency.keySet()) indegree.putIfAbsent(v, 0);
        for (Set<V> targets : adjacency.values())
            for (V t : targets) indegree.merge(t, 1, Integer::sum);
        Deque<V> ready = new ArrayDeque<>();
        indegree.forEach((v, d) -> { if (d == 0) ready.add(v); });
        List<V> order = new ArrayList<>();
        while (!ready.isEmpty()) {
            V v = ready.poll();
            order.add(v);
            for (V t : adjacency.get(v)) {
                if (indegree.merge(t, -1, Integer::sum) == 0) ready.add(t);
            }
        }
        if (order.size() != adjacency.size()) {
            throw new CycleException();
        }
        return order;
    }

    static final class CycleException extends RuntimeException {
    }
}

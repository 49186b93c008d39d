import { beforeEach, describe, expect, it } from "vitest";

import { initConsoleDom, render } from "../src/render";
import type { ConsoleElements } from "../src/render";
import { ConsoleViewModel } from "../src/viewmodel";
import { makeSnapshot, pageBodyHtml } from "./helpers";

let els: ConsoleElements;

beforeEach(() => {
  document.body.innerHTML = pageBodyHtml();
  els = initConsoleDom(document);
});

function lampStates(): string {
  return els.lamps.map((l) => (l.classList.contains("on") ? "1" : "0")).join("");
}

function pin(label: string): HTMLElement {
  const row = els.pinRows.find((r) => r.spec.label === label);
  if (!row) throw new Error(`no pin ${label}`);
  return row.node;
}

describe("render", () => {
  it("shows drive, pose, steering and clock from the snapshot", () => {
    const vm = new ConsoleViewModel();
    vm.applyFrame(
      makeSnapshot({
        t_us: 2_500_000,
        drive: "Forward",
        steering_deg: -45,
        pose: { x_cm: 35, y_cm: -1.25, heading_deg: 12.34 },
      }),
    );
    render(vm, els);
    expect(els.drive.textContent).toBe("Forward");
    expect(els.clock.textContent).toBe("2.500 s");
    expect(els.poseX.textContent).toBe("35.0");
    expect(els.poseY.textContent).toBe("-1.3");
    expect(els.poseHeading.textContent).toBe("12.3");
    expect(els.steeringReadout.textContent).toBe("-45.0°");
    expect(els.steeringNeedle.style.transform).toBe("rotate(-45deg)");
  });

  it("phase lamps follow the snapshot pattern for the whole table cycle", () => {
    const vm = new ConsoleViewModel();
    const cycle = ["0110", "0101", "1001", "1010"];
    cycle.forEach((phases, i) => {
      vm.applyFrame(makeSnapshot({ t_us: i, phases }));
      render(vm, els);
      expect(lampStates()).toBe(phases);
    });
  });

  it("register hex and data pin lamps show the latched byte", () => {
    const vm = new ConsoleViewModel();
    vm.applyFrame(makeSnapshot({ t_us: 1, registers: { data: "0x01", status: "0xd8", control: "0x04" } }));
    render(vm, els);
    expect(els.regData.textContent).toBe("0x01");
    expect(pin("D0").classList.contains("on")).toBe(true);
    expect(pin("D1").classList.contains("on")).toBe(false);
    expect(pin("D7").classList.contains("on")).toBe(false);
  });

  it("control pin lamps show wire levels with inversion applied", () => {
    const vm = new ConsoleViewModel();
    // idle control word 0x04: bits 0,1,3 clear (inverted pins rest high),
    // bit 2 set (nInit high)
    vm.applyFrame(makeSnapshot({ t_us: 1 }));
    render(vm, els);
    for (const label of ["nStrobe", "nAutoFeed", "nInit", "nSelectIn"]) {
      expect(pin(label).classList.contains("on")).toBe(true);
    }
    // all four register bits flipped: every wire goes to the other level
    vm.applyFrame(makeSnapshot({ t_us: 2, registers: { data: "0x00", status: "0xd8", control: "0x0b" } }));
    render(vm, els);
    for (const label of ["nStrobe", "nAutoFeed", "nInit", "nSelectIn"]) {
      expect(pin(label).classList.contains("on")).toBe(false);
    }
    expect(pin("nStrobe").textContent).toBe("¬nStrobe");
    expect(pin("nInit").textContent).toBe("nInit");
  });

  it("busy lamp is the inverse of status bit 7", () => {
    const vm = new ConsoleViewModel();
    vm.applyFrame(makeSnapshot({ t_us: 1, registers: { data: "0x00", status: "0xd8", control: "0x04" } }));
    render(vm, els);
    expect(pin("busy").classList.contains("on")).toBe(false); // bit7 set: wire low
    vm.applyFrame(makeSnapshot({ t_us: 2, registers: { data: "0x00", status: "0x58", control: "0x04" } }));
    render(vm, els);
    expect(pin("busy").classList.contains("on")).toBe(true);
  });

  it("timeout flag lights TMOUT and highlights the TIMEOUT trace row", () => {
    const vm = new ConsoleViewModel();
    vm.applyFrame(
      makeSnapshot({
        t_us: 20,
        timeout_flag: 1,
        registers: { data: "0x01", status: "0xd9", control: "0x04" },
        trace_tail: [
          { t_us: 0, event: "WRITE_ISSUED", value: 1 },
          { t_us: 10, event: "TIMEOUT", value: 1 },
        ],
      }),
    );
    render(vm, els);
    expect(pin("TMOUT").classList.contains("on")).toBe(true);
    const rows = [...els.trace.querySelectorAll(".trace-row")];
    expect(rows.length).toBe(2);
    expect(rows[0]?.textContent).toBe("0 WRITE_ISSUED 0x01");
    expect(rows[0]?.classList.contains("timeout")).toBe(false);
    expect(rows[1]?.textContent).toBe("10 TIMEOUT 0x01");
    expect(rows[1]?.classList.contains("timeout")).toBe(true);
  });

  it("banner, badge and connection indicator reflect the view model", () => {
    const vm = new ConsoleViewModel();
    render(vm, els);
    expect(els.banner.hidden).toBe(true);
    expect(els.badge.hidden).toBe(true);
    expect(els.connection.textContent).toBe("connecting");

    vm.applyFrame(makeSnapshot({ t_us: 1, ended: true }));
    vm.applyFrame(12345);
    vm.setConnection("down");
    render(vm, els);
    expect(els.banner.hidden).toBe(false);
    expect(els.badge.hidden).toBe(false);
    expect(els.connection.textContent).toBe("down");
    expect(els.connection.dataset["state"]).toBe("down");
  });

  it("renders nothing vehicle-specific before the first snapshot", () => {
    const vm = new ConsoleViewModel();
    render(vm, els);
    expect(els.drive.textContent).toBe("Stopped"); // placeholder untouched
    expect(lampStates()).toBe("0000");
  });

  it("counters line mirrors the snapshot counters", () => {
    const vm = new ConsoleViewModel();
    vm.applyFrame(makeSnapshot({ t_us: 1, bytes_written: 7, cycle_end_count: 6, timeouts: 1 }));
    render(vm, els);
    expect(els.counters.textContent).toBe("bytes 7  cycles 6  timeouts 1");
  });
});
